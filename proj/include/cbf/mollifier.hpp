#pragma once

// Time-mollification machinery for sampled trajectories: the normalized
// smooth bump kernel, trajectory convolution, low-mode projection, the
// truncated-and-mollified test-function construction, and the residual of
// the time-integrated momentum balance against such test functions.

#include <vector>

#include "cbf/field.hpp"

namespace cbf {

// Normalized even bump C exp(-1/(1-s^2)) on (-1,1), zero outside, with C
// fixed once by fine quadrature so the kernel has unit mass.
Real bump_profile(Real s);

// Scaled kernel eta_h(s) = eta(s/h) / h of width h.
struct Mollifier {
  Real h = 0;
  Real eta(Real s) const { return bump_profile(s / h) / h; }
};

// Composite-Simpson mass of the scaled kernel over [a, b]; the panel count
// is fixed high enough to pin the result to ~1e-12 for any width.
Real kernel_mass(const Mollifier& m, Real a, Real b);

// A trajectory sampled on a uniform, strictly increasing time grid; all
// fields share one resolution.
struct TrajectorySamples {
  std::vector<Real> times;
  std::vector<SpectralField> fields;
};

// Validates the grid assumptions above and returns the time spacing.
Real trajectory_spacing(const TrajectorySamples& v);

// v^h(s) = int v(tau) eta_h(s - tau) dtau by trapezoid quadrature on the
// sample grid. The integral is truncated at the sampled range with no
// renormalization, so samples within h of either end see reduced mass.
// Widths below twice the sample spacing are rejected as under-resolved.
TrajectorySamples mollify_trajectory(const TrajectorySamples& v,
                                     const Mollifier& m);

// Cube truncation to max_i |k_i| <= n re-embedded at the original
// resolution; n >= K is the identity.
SpectralField low_mode_projection(const SpectralField& f, int n);

// phi(s) = (P_n v 1_{[0,t1]})^h: every sample truncated to n modes, the
// trajectory cut off past t1 (a sample point), then time-mollified, with
// the quadrature honouring the cutoff. Requires h < t1 - t_first and
// h < t_last - t1 so the kernel window never collides with either end.
TrajectorySamples make_test_function(const TrajectorySamples& v, int n,
                                     Real h, Real t1);

// Trajectory distances by trapezoid in time on the shared grid:
// (int ||a-b||_{L^4}^4 dt)^{1/4} and (int ||grad(a-b)||^2 dt)^{1/2}.
Real trajectory_l4_distance(const TrajectorySamples& a,
                            const TrajectorySamples& b);
Real trajectory_grad_distance(const TrajectorySamples& a,
                              const TrajectorySamples& b);

// Residual |LHS - RHS| / ||u(t0)||^2 of the momentum balance integrated
// over [t0, t1] against a divergence-free test trajectory phi:
//
//   -int <u, dphi/dt> + mu int <grad u, grad phi> + int <(u.grad)u, phi>
//     + alpha int <u, phi> + beta int <|u|^{r-1} u, phi>
//   = <u(t0), phi(t0)> - <u(t1), phi(t1)>,
//
// with dphi/dt by 4th-order finite differences (central inside, one-sided
// at the range ends) and composite-Simpson time quadrature. t0 and t1 must
// be sample points; u and phi must share time grid and resolution.
Real weak_form_residual(const TrajectorySamples& v,
                        const TrajectorySamples& phi, const ModelParams& p,
                        Real t0, Real t1);

}  // namespace cbf
