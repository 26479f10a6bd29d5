#pragma once

// Norms, inner products, and weighted Dirichlet functionals.
//
// Quadrature policy: integrands that are polynomial of total degree d in the
// velocity components are integrated exactly by the uniform-grid sum once
// M >= d*K + 1 (the torus trapezoid rule is exact until the integrand
// spectrum wraps past M). Non-polynomial integrands (|u|^q for odd/fractional
// exponents) cannot be dealiased at any finite padding; they get a fixed
// oversampling factor and the remainder is quadrature error by definition.

#include "cbf/field.hpp"

namespace cbf {

// Small numeric helpers shared by the quadrature policies ---------------------

bool is_even_integer(Real q);
bool is_odd_integer(Real q);

// s^e elementwise for s >= 0; exact repeated products for small integer e.
PhysicalArray pow_elem(const PhysicalArray& s, Real e);

// Grid selectors ------------------------------------------------------------

// Exact quadrature for degree-d polynomial integrands of a K-band-limited field.
int exact_product_grid(int K, int degree);

// Oversampled grid for non-polynomial one-shot analysis functionals.
int analysis_grid(int K);

// Grid used to evaluate |u|^q: exact when q is an even integer, analysis
// grid otherwise. Returns the per-axis point count.
int lp_quadrature_grid(int K, Real q);

// Spectral (Parseval) quantities --------------------------------------------

Real l2_norm_sq(const SpectralField& f);         // ||u||_{L2}^2
Real gradient_norm_sq(const SpectralField& f);   // ||grad u||_{L2}^2
Real laplacian_norm_sq(const SpectralField& f);  // ||Lap u||_{L2}^2
Real inner_l2(const SpectralField& a, const SpectralField& b);
Real inner_grad(const SpectralField& a, const SpectralField& b);  // <grad a, grad b>

// Physical-space quantities ---------------------------------------------------

// Pointwise speed squared |u(x)|^2 on the sample grid.
PhysicalArray speed_sq(const PhysicalField& g);

// L^q norm of the speed |u| by uniform-grid quadrature on g's own grid.
Real lp_norm(const PhysicalField& g, Real q);

// ||u||_{L^q}^q evaluated on the policy grid (override with M > 0).
Real lp_norm_pow(const SpectralField& f, Real q, int M = 0);
Real lp_norm(const SpectralField& f, Real q, int M = 0);

// max_x |u(x)| over the collocation grid (M = 0: the field's own grid).
Real max_pointwise_speed(const SpectralField& f, int M = 0);

// ||u||_{L^q}^q together with its rate along udot,
//   d/dt ||u||_{L^q}^q = q integral |u|^{q-2} (u . udot) dx,
// both evaluated on one shared quadrature grid so the rate is the exact
// time derivative of the returned value (needed by quadratures that pair a
// sample with its derivative). Requires q >= 2.
struct LpPowPair {
  Real value = 0;
  Real rate = 0;
};
LpPowPair lp_norm_pow_with_rate(const SpectralField& u,
                                const SpectralField& udot, Real q, int M = 0);

// Weighted Dirichlet functional I_r = integral |grad u|^2 |u|^{r-1} dx,
// the coercive quantity produced by pairing the absorption term with -Lap(u).
// Exact quadrature for odd integer r, analysis grid otherwise (override with
// M > 0).
Real weighted_dirichlet(const SpectralField& f, Real r, int M = 0);

// Bundle of the norms a single diagnostic row wants.
struct NormReport {
  Real q = 0, r = 0;
  Real l2_sq = 0;       // ||u||^2
  Real grad_l2_sq = 0;  // ||grad u||^2
  Real lp = 0;          // ||u||_{L^q}
  Real i_r = 0;         // weighted Dirichlet functional
};
NormReport norm_report(const SpectralField& f, Real q, Real r);

}  // namespace cbf
