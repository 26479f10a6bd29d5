#pragma once

// Momentum equation in projected spectral form:
//
//   du/dt = mu Lap(u) - alpha u - P[(u.grad)u] - P[beta |u|^{r-1} u],
//
// with P the divergence-free projector; the pressure gradient is eliminated
// by P. Nonlinear products are evaluated pseudo-spectrally on padded
// collocation grids sized so that polynomial products are alias-free:
// the quadratic convective term gets the 3/2 band padding, the absorption
// term gets (r+1)/2 for odd integer r (exact) and a factor 2 otherwise, in
// which case the aliasing remainder is classed as quadrature error of the
// non-polynomial integrand.

#include "cbf/field.hpp"

namespace cbf {

struct PadPolicy {
  static int convective_grid(int K);
  static int absorption_grid(int K, Real r);
};

struct TermToggles {
  bool convection = true;
  bool absorption = true;
};

// P[(u.grad)u], gradient form: the nine mode-space derivatives d_j u_i are
// synthesized on the padded grid and contracted pointwise against u_j.
// grid = 0 defers to the field's own grid_n (the run's configured collocation
// size) and to the policy grid when that is unset too; the absorption term
// always defaults to its exact-pairing policy grid.
SpectralField convective_term(const SpectralField& u, int grid = 0);

// P[beta |u|^{r-1} u].
SpectralField absorption_term(const SpectralField& u, Real beta, Real r,
                              int grid = 0);

// The explicit (non-stiff) part of du/dt plus the grid speed bound the step
// controller wants; both come from the same padded-grid sweep.
struct NonlinearEval {
  SpectralField term;  // -P[(u.grad)u] - P[beta |u|^{r-1} u]
  Real max_speed = 0;  // max_x |u(x)| over the sampling grid
};
NonlinearEval nonlinear_term(const SpectralField& u, const ModelParams& p,
                             TermToggles toggles = {});

// Full right-hand side split by physical mechanism;
// total = viscous + darcy - convective - absorption.
struct RhsBreakdown {
  SpectralField viscous;     // mu Lap(u)
  SpectralField darcy;       // -alpha u
  SpectralField convective;  // P[(u.grad)u]
  SpectralField absorption;  // P[beta |u|^{r-1} u]
  SpectralField total;
};
RhsBreakdown rhs(const SpectralField& u, const ModelParams& p);

// du/dt assembled from a precomputed explicit part:
// per mode -(mu |k|^2 + alpha) uhat + nonlinear.
SpectralField time_derivative(const SpectralField& u,
                              const SpectralField& nonlinear,
                              const ModelParams& p);

// Parabolic-rescaling audit. u_lambda(x) = lambda u(lambda x) solves the
// system with coefficients (mu, lambda^2 alpha, lambda^{3-r} beta) exactly
// when u solves the original one; at the operator level,
//
//   rhs_{mu, l^2 alpha, l^{3-r} beta}(u_lambda) = lambda^2 * rescale(rhs_p(u)).
//
// Returns the max coefficient difference of the two routes relative to the
// max coefficient magnitude. Quadrature grids are matched (target grid =
// lambda * source grid) so the identity holds to roundoff even when the
// absorption nonlinearity is not a polynomial.
Real rescale_defect(const SpectralField& u, int lambda, const ModelParams& p);

}  // namespace cbf
