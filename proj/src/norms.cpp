#include "cbf/norms.hpp"

#include <algorithm>
#include <cmath>

#include "cbf/operators.hpp"
#include "cbf/transform.hpp"

namespace cbf {
namespace {

bool is_near_integer(Real q, long& n) {
  n = std::lround(q);
  return std::abs(q - Real(n)) < 1e-9;
}

}  // namespace

bool is_even_integer(Real q) {
  long n;
  return is_near_integer(q, n) && n % 2 == 0;
}

bool is_odd_integer(Real q) {
  long n;
  return is_near_integer(q, n) && n % 2 != 0;
}

PhysicalArray pow_elem(const PhysicalArray& s, Real e) {
  long n;
  if (is_near_integer(e, n) && n >= 0 && n <= 4) {
    switch (n) {
      case 0: return PhysicalArray::Ones(s.size());
      case 1: return s;
      case 2: return s * s;
      case 3: return s * s * s;
      default: {
        PhysicalArray t = s * s;
        return t * t;
      }
    }
  }
  return s.pow(e);
}

int exact_product_grid(int K, int degree) {
  return next_fft_size(std::max(degree * K + 1, 2 * K + 2));
}

int analysis_grid(int K) { return next_fft_size(4 * (2 * K + 1)); }

int lp_quadrature_grid(int K, Real q) {
  if (is_even_integer(q)) return exact_product_grid(K, (int)std::lround(q));
  return analysis_grid(K);
}

Real l2_norm_sq(const SpectralField& f) {
  Real s = 0;
  for (int c = 0; c < 3; ++c) s += f.comp[c].abs2().sum();
  return kDomainVolume * s;
}

Real gradient_norm_sq(const SpectralField& f) {
  Real s = 0;
  for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Real ksq = Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3;
    s += ksq * (std::norm(f.comp[0][i]) + std::norm(f.comp[1][i]) +
                std::norm(f.comp[2][i]));
  });
  return kDomainVolume * s;
}

Real laplacian_norm_sq(const SpectralField& f) {
  Real s = 0;
  for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Real ksq = Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3;
    s += ksq * ksq *
         (std::norm(f.comp[0][i]) + std::norm(f.comp[1][i]) +
          std::norm(f.comp[2][i]));
  });
  return kDomainVolume * s;
}

Real inner_l2(const SpectralField& a, const SpectralField& b) {
  require_same_shape(a, b);
  Real s = 0;
  for (int c = 0; c < 3; ++c)
    s += (a.comp[c] * b.comp[c].conjugate()).real().sum();
  return kDomainVolume * s;
}

Real inner_grad(const SpectralField& a, const SpectralField& b) {
  require_same_shape(a, b);
  Real s = 0;
  for_each_mode(a, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Real ksq = Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3;
    for (int c = 0; c < 3; ++c)
      s += ksq * (a.comp[c][i] * std::conj(b.comp[c][i])).real();
  });
  return kDomainVolume * s;
}

PhysicalArray speed_sq(const PhysicalField& g) {
  return g.comp[0] * g.comp[0] + g.comp[1] * g.comp[1] + g.comp[2] * g.comp[2];
}

Real lp_norm(const PhysicalField& g, Real q) {
  if (!(q > 0)) throw ConfigError("L^q norm needs q > 0");
  const Real cell = kDomainVolume / (Real(g.M) * Real(g.M) * Real(g.M));
  const PhysicalArray s = speed_sq(g);
  const Real sum = pow_elem(s, q / 2).sum() * cell;
  return std::pow(sum, Real(1) / q);
}

Real lp_norm_pow(const SpectralField& f, Real q, int M) {
  if (!(q > 0)) throw ConfigError("L^q norm needs q > 0");
  if (M == 0) M = lp_quadrature_grid(f.K, q);
  const PhysicalField g = to_physical(f, M);
  const Real cell = kDomainVolume / (Real(M) * Real(M) * Real(M));
  return pow_elem(speed_sq(g), q / 2).sum() * cell;
}

Real lp_norm(const SpectralField& f, Real q, int M) {
  return std::pow(lp_norm_pow(f, q, M), Real(1) / q);
}

Real max_pointwise_speed(const SpectralField& f, int M) {
  const PhysicalField g = to_physical(f, M);
  return std::sqrt(speed_sq(g).maxCoeff());
}

LpPowPair lp_norm_pow_with_rate(const SpectralField& u,
                                const SpectralField& udot, Real q, int M) {
  if (!(q >= 2)) throw ConfigError("norm-rate pair needs q >= 2");
  require_same_shape(u, udot);
  if (M == 0) M = lp_quadrature_grid(u.K, q);
  const PhysicalField g = to_physical(u, M);
  const PhysicalField gdot = to_physical(udot, M);
  const Real cell = kDomainVolume / (Real(M) * Real(M) * Real(M));
  const PhysicalArray s = speed_sq(g);
  const PhysicalArray dot = g.comp[0] * gdot.comp[0] +
                            g.comp[1] * gdot.comp[1] +
                            g.comp[2] * gdot.comp[2];
  LpPowPair out;
  out.value = pow_elem(s, q / 2).sum() * cell;
  out.rate = q * (pow_elem(s, (q - 2) / 2) * dot).sum() * cell;
  return out;
}

Real weighted_dirichlet(const SpectralField& f, Real r, int M) {
  if (!(r >= 1)) throw ConfigError("weighted Dirichlet functional needs r >= 1");
  if (M == 0)
    M = is_odd_integer(r) ? exact_product_grid(f.K, (int)std::lround(r) + 1)
                          : analysis_grid(f.K);
  const Eigen::Index n = (Eigen::Index)M * M * M;

  PhysicalArray grad_sq = PhysicalArray::Zero(n);
  PhysicalArray spd_sq = PhysicalArray::Zero(n);
  SpectralArray dmodes;
  PhysicalArray grid;
  for (int c = 0; c < 3; ++c) {
    fft::modes_to_grid(f.comp[c], f.K, M, grid);
    spd_sq += grid * grid;
    for (int axis = 0; axis < 3; ++axis) {
      derivative_scalar(f.comp[c], f.K, axis, dmodes);
      fft::modes_to_grid(dmodes, f.K, M, grid);
      grad_sq += grid * grid;
    }
  }
  const Real cell = kDomainVolume / (Real(M) * Real(M) * Real(M));
  return (grad_sq * pow_elem(spd_sq, (r - 1) / 2)).sum() * cell;
}

NormReport norm_report(const SpectralField& f, Real q, Real r) {
  NormReport rep;
  rep.q = q;
  rep.r = r;
  rep.l2_sq = l2_norm_sq(f);
  rep.grad_l2_sq = gradient_norm_sq(f);
  rep.lp = lp_norm(f, q);
  rep.i_r = weighted_dirichlet(f, r);
  return rep;
}

}  // namespace cbf
