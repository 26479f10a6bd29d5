// Nonlinear terms of the momentum equation. Oracles are hand-expanded
// trigonometric products placed directly in mode space; the projector used
// on the oracle side is the one already certified by the core tests.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cbf/dynamics.hpp"
#include "cbf/initial_conditions.hpp"
#include "cbf/norms.hpp"
#include "cbf/operators.hpp"

using namespace cbf;

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;
const Real kPi3 = kPi * kPi * kPi;

Real max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  Real worst = 0;
  for (int c = 0; c < 3; ++c)
    worst = std::max(worst, (a.comp[c] - b.comp[c]).abs().maxCoeff());
  return worst;
}

Real rel_diff(Real a, Real b) {
  const Real scale = std::max({std::abs(a), std::abs(b), Real(1e-300)});
  return std::abs(a - b) / scale;
}

// u = (sin z, sin x, sin y): solenoidal, all three advection products active.
SpectralField cyclic_field(int K) {
  SpectralField f = SpectralField::zero(K);
  for (int s : {-1, 1}) {
    f.at(0, 0, 0, s) = Complex(0, -Real(s) / 2);
    f.at(1, s, 0, 0) = Complex(0, -Real(s) / 2);
    f.at(2, 0, s, 0) = Complex(0, -Real(s) / 2);
  }
  return f;
}

}  // namespace

TEST_CASE("convective term of the cyclic field matches the expanded product") {
  const SpectralField u = cyclic_field(6);
  const SpectralField conv = convective_term(u);

  // (u.grad)u = (sin y cos z, sin z cos x, sin x cos y), then projected.
  SpectralField w = SpectralField::zero(6);
  for (int s : {-1, 1})
    for (int t : {-1, 1}) {
      w.at(0, 0, s, t) = Complex(0, -Real(s) / 4);  // sin y cos z
      w.at(1, s, 0, t) = Complex(0, -Real(t) / 4);  // sin z cos x
      w.at(2, s, t, 0) = Complex(0, -Real(s) / 4);  // sin x cos y
    }
  leray_project_in_place(w);

  CHECK(max_coeff_diff(conv, w) < 1e-14);
  CHECK(divergence_defect(conv) < 1e-13);
}

TEST_CASE("self-advection of a plane shear vanishes identically") {
  const SpectralField conv = convective_term(ic_shear(5));
  Real worst = 0;
  for (int c = 0; c < 3; ++c)
    worst = std::max(worst, conv.comp[c].abs().maxCoeff());
  CHECK(worst < 1e-16);
}

TEST_CASE("convective term is L2-orthogonal to the velocity") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SpectralField u = ic_random_spectrum(6, seed, -1.5, 1.0);
    const SpectralField conv = convective_term(u);
    const Real scale = std::sqrt(l2_norm_sq(conv) * l2_norm_sq(u));
    CHECK(std::abs(inner_l2(conv, u)) < 1e-12 * std::max(scale, Real(1)));
  }
}

TEST_CASE("cubic absorption of the shear mode lands on the two odd harmonics") {
  const Real beta = 0.7;
  const SpectralField ab = absorption_term(ic_shear(5), beta, 3.0);
  // beta sin^3 y = beta (3 sin y - sin 3y) / 4, already divergence-free.
  SpectralField w = SpectralField::zero(5);
  for (int s : {-1, 1}) {
    w.at(0, 0, s, 0) = Complex(0, -Real(s) * 3 * beta / 8);
    w.at(0, 0, 3 * s, 0) = Complex(0, Real(s) * beta / 8);
  }
  CHECK(max_coeff_diff(ab, w) < 1e-14);
}

TEST_CASE("absorption pairing reproduces the L^{r+1} norm") {
  const SpectralField u = ic_random_spectrum(5, 17, -1.5, 1.0);
  for (Real r : {3.0, 5.0}) {
    const Real lhs = inner_l2(absorption_term(u, 1.0, r), u);
    const Real rhs_val = lp_norm_pow(u, r + 1);
    CHECK(rel_diff(lhs, rhs_val) < 1e-12);
  }
}

TEST_CASE("rhs breakdown of the shear field matches closed forms") {
  const ModelParams p{1.0, 2.0, 1.0, 3.0};
  const SpectralField u = ic_shear(5);
  const RhsBreakdown b = rhs(u, p);

  SpectralField expect_visc = u;  // Lap sin y = -sin y
  for (int c = 0; c < 3; ++c) expect_visc.comp[c] *= Real(-1);
  CHECK(max_coeff_diff(b.viscous, expect_visc) < 1e-15);

  SpectralField expect_darcy = u;
  for (int c = 0; c < 3; ++c) expect_darcy.comp[c] *= Real(-2);
  CHECK(max_coeff_diff(b.darcy, expect_darcy) < 1e-15);

  Real conv_mag = 0;
  for (int c = 0; c < 3; ++c)
    conv_mag = std::max(conv_mag, b.convective.comp[c].abs().maxCoeff());
  CHECK(conv_mag < 1e-16);

  // total = -3 sin y - sin^3 y in the first component.
  SpectralField expect_total = SpectralField::zero(5);
  for (int s : {-1, 1}) {
    expect_total.at(0, 0, s, 0) = Complex(0, Real(s) * (3.0 + 0.75) / 2);
    expect_total.at(0, 0, 3 * s, 0) = Complex(0, -Real(s) / 8);
  }
  CHECK(max_coeff_diff(b.total, expect_total) < 1e-14);
}

TEST_CASE("explicit part assembly matches the full rhs") {
  const ModelParams p{0.3, 0.2, 0.5, 3.0};
  const SpectralField u = ic_taylor_green(6);
  const NonlinearEval nl = nonlinear_term(u, p);
  const SpectralField dudt = time_derivative(u, nl.term, p);
  CHECK(max_coeff_diff(dudt, rhs(u, p).total) < 1e-13);
  CHECK(rel_diff(nl.max_speed, 1.0) < 1e-12);  // vortex peak speed is 1
}

TEST_CASE("term toggles silence exactly their term") {
  const ModelParams p{0.3, 0.0, 0.5, 3.0};
  const SpectralField u = ic_taylor_green(6);
  const NonlinearEval off{SpectralField::zero(6), 0};
  const NonlinearEval both = nonlinear_term(u, p);
  const NonlinearEval no_conv = nonlinear_term(u, p, {false, true});
  const NonlinearEval no_abs = nonlinear_term(u, p, {true, false});
  SpectralField sum = no_conv.term;
  for (int c = 0; c < 3; ++c) sum.comp[c] += no_abs.term.comp[c];
  CHECK(max_coeff_diff(sum, both.term) < 1e-15);
  const NonlinearEval none = nonlinear_term(u, p, {false, false});
  CHECK(max_coeff_diff(none.term, off.term) == 0.0);
}

TEST_CASE("padding policy meets the alias-free thresholds") {
  CHECK(PadPolicy::convective_grid(10) >= 31);
  CHECK(PadPolicy::convective_grid(10) == 32);
  CHECK(PadPolicy::absorption_grid(10, 3.0) >= 41);
  CHECK(PadPolicy::absorption_grid(10, 5.0) >= 61);
  CHECK(PadPolicy::absorption_grid(10, 2.5) >= 42);  // factor-2 fallback
}

TEST_CASE("parabolic rescaling commutes with the full operator") {
  const SpectralField u = ic_random_spectrum(4, 31, -1.5, 0.8);
  const ModelParams crit{0.7, 0.4, 0.9, 3.0};   // scale-critical exponent
  const ModelParams sub{0.7, 0.4, 0.9, 2.0};    // lambda^{3-r} = lambda
  const ModelParams quint{0.7, 0.0, 0.9, 5.0};  // lambda^{3-r} = 1/lambda^2
  CHECK(rescale_defect(u, 2, crit) < 1e-12);
  CHECK(rescale_defect(u, 2, sub) < 1e-12);
  CHECK(rescale_defect(u, 3, quint) < 1e-12);
  CHECK(rescale_defect(ic_taylor_green(4), 2, crit) < 1e-12);
}

TEST_CASE("vortex quartic integral matches its closed form") {
  // ||u||_4^4 for the cellular vortex: the two active components give
  // (3pi/4)^3 each and the cross term 2 u1^2 u2^2 gives 2 (pi/4)^2 (3pi/4),
  // so the total is 15 pi^3 / 16. This integral feeds the absorption
  // diagnostics at r = 3, so it gets its own pin.
  const Real l4 = lp_norm_pow(ic_taylor_green(8), 4.0);
  CHECK(rel_diff(l4, 15.0 * kPi3 / 16.0) < 1e-13);
}
