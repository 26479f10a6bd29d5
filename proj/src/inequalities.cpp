#include "cbf/inequalities.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "cbf/exceptions.hpp"
#include "cbf/norms.hpp"
#include "cbf/operators.hpp"
#include "cbf/transform.hpp"

namespace cbf {

namespace {

// Sandwich integrands are polynomials of degree r+1 in the components when
// r is an odd integer, so the exact product grid settles them. Fractional
// weight exponents make the integrands merely smooth; the grid must then be
// oversampled hard enough that the middle = lower + correction identity
// stays below 1e-8 relative, and the |u|^{r-3} factor of the correction
// (r >= 3 only) is the least smooth piece and needs twice the margin of
// the r < 3 cases.
int sandwich_grid(int K, Real r) {
  if (is_odd_integer(r))
    return exact_product_grid(K, (int)std::lround(r) + 1);
  return next_fft_size((r >= 3 ? 16 : 8) * (2 * K + 1));
}

// Integer power of a nonnegative array by squaring, to keep the hot
// seminorm loop off std::pow for the common even-integer p.
inline Real int_pow(Real base, int e) {
  Real out = 1;
  while (e > 0) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

template <typename Weight>
Real shift_integral(const PhysicalField& u, const std::array<int, 3>& j,
                    Weight&& w) {
  const int M = u.M;
  auto wrap = [M](int i) { return ((i % M) + M) % M; };
  Real acc = 0;
  for (int i1 = 0; i1 < M; ++i1) {
    const Eigen::Index r1 = (Eigen::Index)i1 * M;
    const Eigen::Index s1 = (Eigen::Index)wrap(i1 + j[0]) * M;
    for (int i2 = 0; i2 < M; ++i2) {
      const Eigen::Index r2 = (r1 + i2) * M;
      const Eigen::Index s2 = (s1 + wrap(i2 + j[1])) * M;
      for (int i3 = 0; i3 < M; ++i3) {
        const Eigen::Index a = r2 + i3;
        const Eigen::Index b = s2 + wrap(i3 + j[2]);
        Real ss = 0;
        for (int c = 0; c < 3; ++c) {
          const Real d = u.comp[c][b] - u.comp[c][a];
          ss += d * d;
        }
        acc += w(ss);
      }
    }
  }
  return acc;
}

}  // namespace

SandwichResult weighted_gradient_sandwich(const SpectralField& u, Real r,
                                          int M) {
  if (!(r >= 1)) throw ConfigError("sandwich bound needs r >= 1");
  if (M == 0) M = sandwich_grid(u.K, r);
  const Eigen::Index n = (Eigen::Index)M * M * M;
  const Real cell = kDomainVolume / (Real(M) * Real(M) * Real(M));

  // One sweep collects |u|^2, |grad u|^2, grad |u|^2, and (-Lap u).u on the
  // shared grid.
  std::array<PhysicalArray, 3> ug;
  PhysicalArray spd_sq = PhysicalArray::Zero(n);
  for (int c = 0; c < 3; ++c) {
    fft::modes_to_grid(u.comp[c], u.K, M, ug[c]);
    spd_sq += ug[c] * ug[c];
  }

  PhysicalArray grad_sq = PhysicalArray::Zero(n);
  std::array<PhysicalArray, 3> grad_spd;  // grad |u|^2 = 2 sum_c u_c grad u_c
  for (int a = 0; a < 3; ++a) grad_spd[a] = PhysicalArray::Zero(n);
  SpectralArray dmodes;
  PhysicalArray dgrid;
  for (int c = 0; c < 3; ++c) {
    for (int a = 0; a < 3; ++a) {
      derivative_scalar(u.comp[c], u.K, a, dmodes);
      fft::modes_to_grid(dmodes, u.K, M, dgrid);
      grad_sq += dgrid * dgrid;
      grad_spd[a] += 2 * ug[c] * dgrid;
    }
  }

  PhysicalArray lap_dot_u = PhysicalArray::Zero(n);
  const SpectralField lap = laplacian(u);
  for (int c = 0; c < 3; ++c) {
    fft::modes_to_grid(lap.comp[c], u.K, M, dgrid);
    lap_dot_u -= dgrid * ug[c];
  }

  const PhysicalArray weight = pow_elem(spd_sq, (r - 1) / 2);
  SandwichResult out;
  out.lower = (grad_sq * weight).sum() * cell;
  out.middle = (lap_dot_u * weight).sum() * cell;
  out.upper = r * out.lower;
  if (r >= 3) {
    const PhysicalArray gs2 = grad_spd[0] * grad_spd[0] +
                              grad_spd[1] * grad_spd[1] +
                              grad_spd[2] * grad_spd[2];
    out.correction =
        ((r - 1) / 4) * (pow_elem(spd_sq, (r - 3) / 2) * gs2).sum() * cell;
  } else {
    out.correction = std::numeric_limits<Real>::quiet_NaN();
  }
  return out;
}

std::optional<Real> sobolev_absorption_ratio(const SpectralField& u, Real r,
                                             int M) {
  if (!(r >= 1)) throw ConfigError("absorption embedding needs r >= 1");
  const Real ir = weighted_dirichlet(u, r, M);
  if (!(ir > 0)) return std::nullopt;
  // ||u||_{L^q}^{r+1} = (||u||_{L^q}^q)^{1/3} because q = 3 (r+1).
  return std::cbrt(lp_norm_pow(u, 3 * (r + 1), M)) / ir;
}

Real nikolskii_seminorm(const PhysicalField& u, Real s, Real p, Real delta) {
  if (!(s > 0) || !(s < 1))
    throw ConfigError("difference seminorm needs s in (0,1)");
  if (!(p >= 1)) throw ConfigError("difference seminorm needs p >= 1");
  if (!(delta > 0) || delta > kTwoPi / 2)
    throw ConfigError("difference seminorm needs delta in (0, pi]");
  const int M = u.M;
  if (M < 2) throw ConfigError("difference seminorm needs a real grid");

  const Real cell = kDomainVolume / (Real(M) * Real(M) * Real(M));
  const Real step = kTwoPi / M;
  const Real rlim = delta / step;        // |j| < rlim includes the shift
  const Real rlim_sq = rlim * rlim;
  const int jc = (int)std::floor(rlim);  // per-axis bound

  const bool even_p = is_even_integer(p);
  const int half_p = even_p ? (int)std::lround(p) / 2 : 0;

  Real best = 0;
  for (int j1 = 0; j1 <= jc; ++j1) {
    for (int j2 = (j1 > 0 ? -jc : 0); j2 <= jc; ++j2) {
      for (int j3 = (j1 > 0 || j2 > 0 ? -jc : 1); j3 <= jc; ++j3) {
        // One representative of each {j, -j} pair; the integral is even in j.
        const Real jsq = Real(j1) * j1 + Real(j2) * j2 + Real(j3) * j3;
        if (!(jsq < rlim_sq)) continue;
        const std::array<int, 3> j{j1, j2, j3};
        const Real raw =
            even_p
                ? shift_integral(u, j, [&](Real ss) { return int_pow(ss, half_p); })
                : shift_integral(u, j,
                                 [&](Real ss) { return std::pow(ss, p / 2); });
        const Real hnorm = step * std::sqrt(jsq);
        const Real quot = raw * cell / std::pow(hnorm, s * p);
        if (quot > best) best = quot;
      }
    }
  }
  return best;
}

NikolskiiPair nikolskii_absorption_pair(const SpectralField& u, Real r,
                                        Real delta, int M) {
  if (!(r > 1)) throw ConfigError("difference/Dirichlet pair needs r > 1");
  if (M == 0) M = lp_quadrature_grid(u.K, r + 1);
  NikolskiiPair out;
  out.seminorm_pow =
      nikolskii_seminorm(to_physical(u, M), 2 / (r + 1), r + 1, delta);
  out.dirichlet = weighted_dirichlet(u, r);
  return out;
}

}  // namespace cbf
