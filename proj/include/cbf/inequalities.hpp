#pragma once

// Pointwise-in-time functional inequalities for band-limited velocity
// fields: the weighted-gradient sandwich around the Laplacian/absorption
// pairing, the L^{3(r+1)} absorption embedding ratio, and a discrete
// Nikolskii difference seminorm. All integrals are collocation quadrature;
// grid defaults follow the norms module conventions.

#include <optional>

#include "cbf/field.hpp"

namespace cbf {

// Quadrature values of the three-way bound
//
//   0 <= I_r <= int (-Lap u) . |u|^{r-1} u <= r I_r,
//
// with I_r = int |grad u|^2 |u|^{r-1} the weighted Dirichlet integral.
// `correction` is the exact gap ((r-1)/4) int |u|^{r-3} |grad |u|^2|^2, so
// middle = lower + correction up to quadrature error; it is only defined
// for r >= 3 (NaN below that, where the weight exponent turns negative).
struct SandwichResult {
  Real lower = 0;       // I_r
  Real middle = 0;      // int (-Lap u) . |u|^{r-1} u
  Real upper = 0;       // r I_r
  Real correction = 0;  // identity gap, r >= 3 only
};

// All four integrals share one collocation grid: the exact product grid of
// degree r+1 for odd integer r, a heavily oversampled grid otherwise, sized
// so the identity contract above survives the fractional weight. M overrides.
SandwichResult weighted_gradient_sandwich(const SpectralField& u, Real r,
                                          int M = 0);

// ||u||_{L^{3(r+1)}}^{r+1} / I_r: the constant-free shape of the embedding
// that controls the absorption exponent. Empty when I_r vanishes.
std::optional<Real> sobolev_absorption_ratio(const SpectralField& u, Real r,
                                             int M = 0);

// Discrete difference seminorm (to the p-th power)
//
//   sup_{0 < |h| < delta} int |u(x+h) - u(x)|^p dx / |h|^{s p},
//
// with the sup ranging over the lattice shifts h = (2 pi / M) j of u's own
// grid; refining the grid refines the sup. delta defaults to the half
// period, the largest radius free of wrap ambiguity.
Real nikolskii_seminorm(const PhysicalField& u, Real s, Real p,
                        Real delta = kTwoPi / 2);

// The seminorm at the smoothing exponents s = 2/(r+1), p = r+1 paired with
// I_r, so the empirical constant of the difference estimate can be tracked.
struct NikolskiiPair {
  Real seminorm_pow = 0;  // seminorm^{r+1}
  Real dirichlet = 0;     // I_r
};
NikolskiiPair nikolskii_absorption_pair(const SpectralField& u, Real r,
                                        Real delta = kTwoPi / 2, int M = 0);

}  // namespace cbf
