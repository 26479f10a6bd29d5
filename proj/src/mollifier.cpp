#include "cbf/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "cbf/dynamics.hpp"
#include "cbf/exceptions.hpp"
#include "cbf/norms.hpp"
#include "cbf/operators.hpp"

namespace cbf {

namespace {

Real raw_bump(Real s) {
  const Real t = 1 - s * s;
  return t > 0 ? std::exp(-1 / t) : Real(0);
}

// Midpoint normalizer: the bump is smooth with every derivative vanishing
// at the support ends, so the rule converges faster than any power of the
// panel count and 2^14 panels pin C well past double precision.
Real bump_normalizer() {
  static const Real c = [] {
    const int n = 1 << 14;
    Real sum = 0;
    for (int i = 0; i < n; ++i) sum += raw_bump(-1 + (2 * i + 1) / Real(n));
    return Real(n) / (2 * sum);
  }();
  return c;
}

SpectralField zero_like(const SpectralField& f) {
  return SpectralField::zero(f.K, f.grid_n);
}

void axpy(SpectralField& acc, Real w, const SpectralField& f) {
  for (int c = 0; c < 3; ++c) acc.comp[c] += w * f.comp[c];
}

// Kernel-weighted trapezoid sum of v over sample indices [0, last].
SpectralField convolve_at(const TrajectorySamples& v,
                          const std::vector<SpectralField>& fields,
                          std::size_t last, const Mollifier& m, Real s) {
  SpectralField acc = zero_like(fields.front());
  for (std::size_t j = 0; j <= last; ++j) {
    const Real eta = m.eta(s - v.times[j]);
    if (eta == 0) continue;
    const Real dt = v.times[1] - v.times[0];
    axpy(acc, eta * ((j == 0 || j == last) ? dt / 2 : dt), fields[j]);
  }
  return acc;
}

std::size_t locate_sample(const TrajectorySamples& v, Real t,
                          const char* what) {
  for (std::size_t i = 0; i < v.times.size(); ++i)
    if (std::abs(v.times[i] - t) <= 1e-12 * std::max(Real(1), std::abs(t)))
      return i;
  throw ConfigError(std::string(what) + " must be a sample point");
}

Real require_shared_grid(const TrajectorySamples& a,
                         const TrajectorySamples& b) {
  const Real dt = trajectory_spacing(a);
  trajectory_spacing(b);
  if (a.times.size() != b.times.size())
    throw ConfigError("trajectories must share the time grid");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw ConfigError("trajectories must share the time grid");
  if (a.fields.front().K != b.fields.front().K)
    throw ConfigError("trajectories must share the resolution");
  return dt;
}

// Composite Simpson over a uniform sample vector; an odd interval count
// gets a third-order closed three-point tail, keeping the total O(dt^4).
Real integrate_uniform(const std::vector<Real>& f, Real dt) {
  const std::size_t m = f.size() - 1;
  if (m < 2) throw ConfigError("time quadrature needs at least 3 samples");
  const std::size_t even_end = (m % 2 == 0) ? m : m - 1;
  Real acc = f[0] + f[even_end];
  for (std::size_t i = 1; i < even_end; ++i)
    acc += (i % 2 ? 4 : 2) * f[i];
  acc *= dt / 3;
  if (m % 2)
    acc += dt * (5 * f[m] + 8 * f[m - 1] - f[m - 2]) / 12;
  return acc;
}

}  // namespace

Real bump_profile(Real s) { return bump_normalizer() * raw_bump(s); }

Real kernel_mass(const Mollifier& m, Real a, Real b) {
  if (!(m.h > 0)) throw ConfigError("mollifier width must be positive");
  const int n = 1 << 13;  // Simpson nodes: 2n+1
  const Real dx = (b - a) / (2 * n);
  Real sum = m.eta(a) + m.eta(b);
  for (int i = 1; i < 2 * n; ++i) sum += (i % 2 ? 4 : 2) * m.eta(a + i * dx);
  return sum * dx / 3;
}

Real trajectory_spacing(const TrajectorySamples& v) {
  if (v.times.size() != v.fields.size())
    throw ConfigError("trajectory times and fields must pair up");
  if (v.times.size() < 2)
    throw ConfigError("trajectory needs at least two samples");
  const Real dt = v.times[1] - v.times[0];
  if (!(dt > 0)) throw ConfigError("trajectory times must increase");
  const Real scale = std::max(Real(1), std::abs(v.times.back()));
  for (std::size_t i = 1; i < v.times.size(); ++i)
    if (std::abs(v.times[i] - v.times[i - 1] - dt) > 1e-9 * scale)
      throw ConfigError("trajectory time grid must be uniform");
  const int K = v.fields.front().K;
  for (const auto& f : v.fields)
    if (f.K != K) throw ConfigError("trajectory fields must share resolution");
  return dt;
}

TrajectorySamples mollify_trajectory(const TrajectorySamples& v,
                                     const Mollifier& m) {
  const Real dt = trajectory_spacing(v);
  const Real span = v.times.back() - v.times.front();
  if (!(m.h > 0) || !(m.h < span))
    throw ConfigError("mollifier width must lie inside the sampled span");
  if (m.h < 2 * dt)
    throw ConfigError("mollifier width under-resolved by the time grid");

  TrajectorySamples out;
  out.times = v.times;
  out.fields.reserve(v.times.size());
  for (std::size_t i = 0; i < v.times.size(); ++i)
    out.fields.push_back(
        convolve_at(v, v.fields, v.fields.size() - 1, m, v.times[i]));
  return out;
}

SpectralField low_mode_projection(const SpectralField& f, int n) {
  if (n < 1) throw ResolutionError("mode projection needs n >= 1");
  if (n >= f.K) return f;
  return embed_modes(truncate_modes(f, n), f.K, f.grid_n);
}

TrajectorySamples make_test_function(const TrajectorySamples& v, int n,
                                     Real h, Real t1) {
  const Real dt = trajectory_spacing(v);
  const std::size_t i1 = locate_sample(v, t1, "cutoff time");
  if (!(h > 0) || !(h < t1 - v.times.front()) ||
      !(h < v.times.back() - t1))
    throw ConfigError("mollifier width must clear the cutoff and both ends");
  if (h < 2 * dt)
    throw ConfigError("mollifier width under-resolved by the time grid");

  std::vector<SpectralField> low;
  low.reserve(i1 + 1);
  for (std::size_t j = 0; j <= i1; ++j)
    low.push_back(low_mode_projection(v.fields[j], n));

  const Mollifier m{h};
  TrajectorySamples out;
  out.times = v.times;
  out.fields.reserve(v.times.size());
  for (std::size_t i = 0; i < v.times.size(); ++i)
    out.fields.push_back(convolve_at(v, low, i1, m, v.times[i]));
  return out;
}

Real trajectory_l4_distance(const TrajectorySamples& a,
                            const TrajectorySamples& b) {
  const Real dt = require_shared_grid(a, b);
  Real acc = 0;
  const std::size_t last = a.times.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    SpectralField d = zero_like(a.fields[i]);
    for (int c = 0; c < 3; ++c)
      d.comp[c] = a.fields[i].comp[c] - b.fields[i].comp[c];
    acc += lp_norm_pow(d, 4) * ((i == 0 || i == last) ? dt / 2 : dt);
  }
  return std::pow(acc, Real(0.25));
}

Real trajectory_grad_distance(const TrajectorySamples& a,
                              const TrajectorySamples& b) {
  const Real dt = require_shared_grid(a, b);
  Real acc = 0;
  const std::size_t last = a.times.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    SpectralField d = zero_like(a.fields[i]);
    for (int c = 0; c < 3; ++c)
      d.comp[c] = a.fields[i].comp[c] - b.fields[i].comp[c];
    acc += gradient_norm_sq(d) * ((i == 0 || i == last) ? dt / 2 : dt);
  }
  return std::sqrt(acc);
}

Real weak_form_residual(const TrajectorySamples& v,
                        const TrajectorySamples& phi, const ModelParams& p,
                        Real t0, Real t1) {
  validate(p);
  const Real dt = require_shared_grid(v, phi);
  const std::size_t n = v.times.size();
  if (n < 5)
    throw ConfigError("weak-form residual needs at least five samples");
  const std::size_t i0 = locate_sample(v, t0, "interval start");
  const std::size_t i1 = locate_sample(v, t1, "interval end");
  if (i0 + 2 > i1)
    throw ConfigError("weak-form interval must span at least two steps");

  for (std::size_t i = 0; i < n; ++i) {
    const Real tol = 1e-8 * (1 + std::sqrt(l2_norm_sq(phi.fields[i])));
    if (divergence_defect(phi.fields[i]) > tol)
      throw ConfigError("test trajectory must be divergence-free");
  }

  const int K = phi.fields.front().K;
  const int grid = phi.fields.front().grid_n;
  // d phi / dt at sample i: 4th-order central stencil inside, one-sided
  // 5-point stencils at the range ends.
  auto dphi_at = [&](std::size_t i) {
    SpectralField d = SpectralField::zero(K, grid);
    auto add = [&](Real w, std::size_t j) { axpy(d, w, phi.fields[j]); };
    const Real s = 1 / (12 * dt);
    if (i >= 2 && i + 2 < n) {
      add(s, i - 2), add(-8 * s, i - 1), add(8 * s, i + 1), add(-s, i + 2);
    } else if (i == 0) {
      add(-25 * s, 0), add(48 * s, 1), add(-36 * s, 2), add(16 * s, 3),
          add(-3 * s, 4);
    } else if (i == 1) {
      add(-3 * s, 0), add(-10 * s, 1), add(18 * s, 2), add(-6 * s, 3),
          add(s, 4);
    } else if (i + 2 == n) {
      add(3 * s, n - 1), add(10 * s, n - 2), add(-18 * s, n - 3),
          add(6 * s, n - 4), add(-s, n - 5);
    } else {
      add(25 * s, n - 1), add(-48 * s, n - 2), add(36 * s, n - 3),
          add(-16 * s, n - 4), add(3 * s, n - 5);
    }
    return d;
  };

  std::vector<Real> g;
  g.reserve(i1 - i0 + 1);
  for (std::size_t i = i0; i <= i1; ++i) {
    const SpectralField& u = v.fields[i];
    const SpectralField& w = phi.fields[i];
    Real val = -inner_l2(u, dphi_at(i));
    val += p.mu * inner_grad(u, w);
    val += inner_l2(convective_term(u), w);
    if (p.alpha != 0) val += p.alpha * inner_l2(u, w);
    if (p.beta != 0) val += inner_l2(absorption_term(u, p.beta, p.r), w);
    g.push_back(val);
  }

  const Real lhs = integrate_uniform(g, dt);
  const Real rhs = inner_l2(v.fields[i0], phi.fields[i0]) -
                   inner_l2(v.fields[i1], phi.fields[i1]);
  Real denom = l2_norm_sq(v.fields[i0]);
  if (denom == 0) denom = 1;
  return std::abs(lhs - rhs) / denom;
}

}  // namespace cbf
