#include "cbf/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "cbf/norms.hpp"
#include "cbf/operators.hpp"
#include "cbf/transform.hpp"

namespace cbf {

int PadPolicy::convective_grid(int K) {
  // Quadratic products reach mode 2K; 3K+1 grid points keep every retained
  // coefficient alias-free. ceil(3/2 * (2K+1)) = 3K+2 covers it.
  return next_fft_size(3 * K + 2);
}

int PadPolicy::absorption_grid(int K, Real r) {
  if (is_odd_integer(r)) {
    // |u|^{r-1} u is a polynomial of degree r: products reach mode rK and the
    // pairing against the retained band needs (r+1)K + 1 points. The
    // (r+1)/2 band padding gives (r+1)K + (r+1)/2 >= that.
    const int ri = (int)std::lround(r);
    return next_fft_size((ri + 1) * K + (ri + 1) / 2);
  }
  // Non-polynomial nonlinearity: factor-2 band padding; the remainder is
  // quadrature error of a non-band-limited integrand, not aliasing.
  return next_fft_size(2 * (2 * K + 1));
}

namespace {

struct ConvectiveResult {
  SpectralField field;
  Real max_speed;
};

ConvectiveResult convective_eval(const SpectralField& u, int grid = 0) {
  const int K = u.K;
  const int M = grid > 0 ? grid
                         : (u.grid_n > 0 ? u.grid_n
                                         : PadPolicy::convective_grid(K));
  const Eigen::Index n = (Eigen::Index)M * M * M;

  std::array<PhysicalArray, 3> ug;
  for (int c = 0; c < 3; ++c) fft::modes_to_grid(u.comp[c], K, M, ug[c]);

  std::array<PhysicalArray, 3> w;
  for (auto& wc : w) wc = PhysicalArray::Zero(n);

  SpectralArray dmodes;
  PhysicalArray dgrid;
  for (int c = 0; c < 3; ++c)
    for (int axis = 0; axis < 3; ++axis) {
      derivative_scalar(u.comp[c], K, axis, dmodes);
      fft::modes_to_grid(dmodes, K, M, dgrid);
      w[c] += ug[axis] * dgrid;  // u_j d_j u_c
    }

  ConvectiveResult res{SpectralField::zero(K, u.grid_n), 0.0};
  for (int c = 0; c < 3; ++c) fft::grid_to_modes(w[c], M, K, res.field.comp[c]);
  leray_project_in_place(res.field);
  res.max_speed =
      std::sqrt((ug[0] * ug[0] + ug[1] * ug[1] + ug[2] * ug[2]).maxCoeff());
  return res;
}

struct AbsorptionResult {
  SpectralField field;
  Real max_speed;
};

AbsorptionResult absorption_eval(const SpectralField& u, Real beta, Real r,
                                 int grid = 0) {
  const int K = u.K;
  const int M = grid > 0 ? grid : PadPolicy::absorption_grid(K, r);

  std::array<PhysicalArray, 3> ug;
  for (int c = 0; c < 3; ++c) fft::modes_to_grid(u.comp[c], K, M, ug[c]);

  const PhysicalArray s = ug[0] * ug[0] + ug[1] * ug[1] + ug[2] * ug[2];
  const PhysicalArray weight = beta * pow_elem(s, (r - 1) / 2);

  AbsorptionResult res{SpectralField::zero(K, u.grid_n),
                       std::sqrt(s.maxCoeff())};
  PhysicalArray w;
  for (int c = 0; c < 3; ++c) {
    w = weight * ug[c];
    fft::grid_to_modes(w, M, K, res.field.comp[c]);
  }
  leray_project_in_place(res.field);
  return res;
}

}  // namespace

SpectralField convective_term(const SpectralField& u, int grid) {
  return convective_eval(u, grid).field;
}

SpectralField absorption_term(const SpectralField& u, Real beta, Real r,
                              int grid) {
  if (beta == 0.0) return SpectralField::zero(u.K, u.grid_n);
  return absorption_eval(u, beta, r, grid).field;
}

NonlinearEval nonlinear_term(const SpectralField& u, const ModelParams& p,
                             TermToggles toggles) {
  NonlinearEval out{SpectralField::zero(u.K, u.grid_n), 0.0};
  const bool need_absorption = toggles.absorption && p.beta != 0.0;
  if (toggles.convection) {
    ConvectiveResult conv = convective_eval(u);
    out.max_speed = conv.max_speed;
    for (int c = 0; c < 3; ++c) out.term.comp[c] = -conv.field.comp[c];
  }
  if (need_absorption) {
    AbsorptionResult abs = absorption_eval(u, p.beta, p.r);
    if (!toggles.convection) out.max_speed = abs.max_speed;
    for (int c = 0; c < 3; ++c) out.term.comp[c] -= abs.field.comp[c];
  }
  return out;
}

RhsBreakdown rhs(const SpectralField& u, const ModelParams& p) {
  validate(p);
  RhsBreakdown b{laplacian(u), u, convective_term(u),
                 absorption_term(u, p.beta, p.r),
                 SpectralField::zero(u.K, u.grid_n)};
  for (int c = 0; c < 3; ++c) {
    b.viscous.comp[c] *= p.mu;
    b.darcy.comp[c] *= -p.alpha;
    b.total.comp[c] = b.viscous.comp[c] + b.darcy.comp[c] -
                      b.convective.comp[c] - b.absorption.comp[c];
  }
  return b;
}

Real rescale_defect(const SpectralField& u, int lambda, const ModelParams& p) {
  validate(p);
  const SpectralField ul = parabolic_rescale(u, lambda);
  const ModelParams ps{p.mu, Real(lambda) * lambda * p.alpha,
                       std::pow(Real(lambda), 3 - p.r) * p.beta, p.r};

  // Route A: the operator applied to the rescaled snapshot, with quadrature
  // grids lambda times the source grids so both routes sum the same samples.
  const int conv_grid = lambda * PadPolicy::convective_grid(u.K);
  const int abs_grid = lambda * PadPolicy::absorption_grid(u.K, p.r);
  SpectralField a = laplacian(ul);
  for (int c = 0; c < 3; ++c)
    a.comp[c] = ps.mu * a.comp[c] - ps.alpha * ul.comp[c];
  {
    const SpectralField conv = convective_term(ul, conv_grid);
    const SpectralField ab = absorption_term(ul, ps.beta, ps.r, abs_grid);
    for (int c = 0; c < 3; ++c) a.comp[c] -= conv.comp[c] + ab.comp[c];
  }

  // Route B: rescale the operator output.
  SpectralField rb = laplacian(u);
  for (int c = 0; c < 3; ++c)
    rb.comp[c] = p.mu * rb.comp[c] - p.alpha * u.comp[c];
  {
    const SpectralField conv = convective_term(u);
    const SpectralField ab = absorption_term(u, p.beta, p.r);
    for (int c = 0; c < 3; ++c) rb.comp[c] -= conv.comp[c] + ab.comp[c];
  }
  SpectralField b = parabolic_rescale(rb, lambda);
  const Real l2 = Real(lambda) * lambda;
  for (int c = 0; c < 3; ++c) b.comp[c] *= l2;

  Real worst = 0, scale = 0;
  for (int c = 0; c < 3; ++c) {
    worst = std::max(worst, (a.comp[c] - b.comp[c]).abs().maxCoeff());
    scale = std::max(scale, b.comp[c].abs().maxCoeff());
  }
  return worst / std::max(scale, Real(1e-300));
}

SpectralField time_derivative(const SpectralField& u,
                              const SpectralField& nonlinear,
                              const ModelParams& p) {
  require_same_shape(u, nonlinear);
  SpectralField d = SpectralField::zero(u.K, u.grid_n);
  for_each_mode(u, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Real lam = p.mu * (Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3) + p.alpha;
    for (int c = 0; c < 3; ++c)
      d.comp[c][i] = -lam * u.comp[c][i] + nonlinear.comp[c][i];
  });
  return d;
}

}  // namespace cbf
