// Integrating-factor RK4 stepper: exactness on the linear part, classical
// order on the full system, controller behaviour, landing, and determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "cbf/exceptions.hpp"
#include "cbf/initial_conditions.hpp"
#include "cbf/norms.hpp"
#include "cbf/stepper.hpp"

using namespace cbf;

namespace {

Real max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  Real worst = 0;
  for (int c = 0; c < 3; ++c)
    worst = std::max(worst, (a.comp[c] - b.comp[c]).abs().maxCoeff());
  return worst;
}

StepControl fixed_control(Real dt) {
  StepControl c;
  c.dt_init = c.dt_min = c.dt_max = dt;
  return c;
}

} // namespace

TEST_CASE("plane shear under pure viscosity reproduces exact heat decay") {
  // Self-advection of (sin y, 0, 0) vanishes, so with beta = 0 the exact
  // solution is e^{-t} (sin y, 0, 0) and the integrating factor carries it.
  StepperState s;
  s.field = ic_shear(5);
  s.params = ModelParams{1.0, 0.0, 0.0, 3.0};

  IntegrateOptions opt;
  opt.t_end = 0.5;
  const IntegrateStats st = integrate(s, fixed_control(1.0 / 32), opt);

  CHECK(st.accepted == 16);
  CHECK(s.time == 0.5);
  const Complex expect = Complex(0, -0.5) * std::exp(-0.5);
  CHECK(std::abs(s.field.at(0, 0, 1, 0) - expect) <=
        1e-12 * std::abs(expect));
  CHECK(std::abs(s.field.at(0, 0, -1, 0) - std::conj(expect)) <=
        1e-12 * std::abs(expect));

  // Nothing leaks into other modes beyond transform roundoff.
  SpectralField residual = s.field;
  residual.at(0, 0, 1, 0) = 0;
  residual.at(0, 0, -1, 0) = 0;
  CHECK(max_coeff_diff(residual, SpectralField::zero(5)) < 1e-14);
}

TEST_CASE("with the nonlinear terms disabled each mode decays by the factor") {
  StepperState s;
  s.field = ic_taylor_green(4);
  s.params = ModelParams{0.7, 0.3, 0.9, 3.0};
  const SpectralField u0 = s.field;

  IntegrateOptions opt;
  opt.t_end = 0.25;
  opt.toggles = TermToggles{false, false};
  const Real dt = 1.0 / 16;
  const IntegrateStats st = integrate(s, fixed_control(dt), opt);
  CHECK(st.accepted == 4);

  // |k|^2 = 3 on every vortex mode: factor exp(-(0.7*3 + 0.3) t).
  const Real factor = std::exp(-(0.7 * 3 + 0.3) * 0.25);
  for (int c = 0; c < 2; ++c) {
    const Real diff =
        (s.field.comp[c] - factor * u0.comp[c]).abs().maxCoeff();
    CHECK(diff < 1e-15);
  }
}

TEST_CASE("the zero field stays exactly zero") {
  StepperState s;
  s.field = SpectralField::zero(4);
  s.params = ModelParams{1.0, 0.5, 1.0, 3.0};
  IntegrateOptions opt;
  opt.t_end = 0.1;
  const IntegrateStats st = integrate(s, fixed_control(0.05), opt);
  CHECK(st.accepted == 2);
  CHECK(max_coeff_diff(s.field, SpectralField::zero(4)) == 0.0);
}

TEST_CASE("kinetic energy decreases strictly along a damped vortex run") {
  StepperState s;
  s.field = ic_taylor_green(6);
  s.params = ModelParams{1.0, 0.0, 1.0, 3.0};

  std::vector<Real> energy;
  IntegrateOptions opt;
  opt.t_end = 0.3;
  StepControl c;
  c.dt_init = 1e-2;
  c.dt_min = 1e-6;
  c.dt_max = 0.1;
  const Observer obs = [&](const Sample& sm) {
    energy.push_back(l2_norm_sq(sm.u));
  };
  integrate(s, c, opt, obs);

  REQUIRE(energy.size() >= 3);
  for (std::size_t i = 1; i < energy.size(); ++i)
    CHECK(energy[i] < energy[i - 1]);
}

TEST_CASE("stability ceiling matches its closed form") {
  const ModelParams p{1.0, 0.0, 1.0, 3.0};
  CHECK(std::isinf(stability_bound(0.0, 10, ModelParams{1.0, 0.0, 0.0, 3.0})));
  CHECK(stability_bound(ic_taylor_green(10), p) ==
        doctest::Approx(0.1).epsilon(1e-12));

  // Doubling beta at fixed speed at most halves the absorption part.
  const ModelParams p2{1.0, 0.0, 2.0, 3.0};
  const Real b1 = stability_bound(2.0, 10, p);
  const Real b2 = stability_bound(2.0, 10, p2);
  CHECK(b2 >= b1 / 2 - 1e-15);
}

TEST_CASE("integration to the current time is the identity") {
  StepperState s;
  s.field = ic_beltrami(4);
  s.time = 0.7;
  s.params = ModelParams{0.5, 0.0, 0.5, 3.0};
  const SpectralField before = s.field;

  int initial_samples = 0;
  IntegrateOptions opt;
  opt.t_end = 0.7;
  const IntegrateStats st =
      integrate(s, fixed_control(0.01), opt,
                [&](const Sample& sm) { initial_samples += (sm.dt == 0); });
  CHECK(st.accepted == 0);
  CHECK(initial_samples == 1);
  CHECK(max_coeff_diff(s.field, before) == 0.0);
  CHECK(s.time == 0.7);
}

TEST_CASE("two half intervals reproduce one full run bit-exactly") {
  // Dyadic dt divides both halves, so every step of the split run performs
  // the same arithmetic as the corresponding step of the full run.
  const ModelParams p{0.3, 0.1, 0.5, 3.0};
  const Real dt = 1.0 / 128;
  const StepControl c = fixed_control(dt);

  StepperState full;
  full.field = ic_taylor_green(5);
  full.params = p;
  IntegrateOptions opt;
  opt.t_end = 0.25;
  integrate(full, c, opt);

  StepperState split;
  split.field = ic_taylor_green(5);
  split.params = p;
  IntegrateOptions first;
  first.t_end = 0.125;
  integrate(split, c, first);
  IntegrateOptions second;
  second.t_end = 0.25;
  integrate(split, c, second);

  CHECK(split.step_count == full.step_count);
  CHECK(split.time == full.time);
  CHECK(max_coeff_diff(split.field, full.field) == 0.0);
}

TEST_CASE("l2 error under dt halving contracts at fourth order") {
  const ModelParams p{0.3, 0.0, 0.5, 3.0};
  const Real t_end = 0.25;

  const auto run = [&](Real dt) {
    StepperState s;
    s.field = ic_taylor_green(4);
    s.params = p;
    IntegrateOptions opt;
    opt.t_end = t_end;
    integrate(s, fixed_control(dt), opt);
    return s.field;
  };

  const SpectralField ref = run(1.0 / 512);
  std::vector<Real> errs;
  for (Real dt : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    SpectralField d = run(dt);
    for (int c = 0; c < 3; ++c) d.comp[c] -= ref.comp[c];
    errs.push_back(std::sqrt(l2_norm_sq(d)));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const Real order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
  }
}

TEST_CASE("landing step shortens to hit the end time exactly") {
  StepperState s;
  s.field = ic_shear(4);
  s.params = ModelParams{1.0, 0.0, 0.0, 3.0};
  IntegrateOptions opt;
  opt.t_end = 0.35;
  const IntegrateStats st = integrate(s, fixed_control(0.1), opt);
  CHECK(st.accepted == 4);
  CHECK(s.time == 0.35);
  CHECK(std::abs(st.last_dt - 0.05) < 1e-14);
}

TEST_CASE("controller rejects an oversized first step and meets tolerance") {
  StepperState s;
  s.field = ic_taylor_green(5);
  s.params = ModelParams{0.2, 0.0, 1.0, 3.0};

  StepControl c;
  c.dt_init = 0.1; // far above the accuracy-limited step
  c.dt_min = 1e-7;
  c.dt_max = 0.1;
  c.abs_tol = 1e-12;
  c.rel_tol = 1e-10;

  IntegrateOptions opt;
  opt.t_end = 0.05;
  const IntegrateStats st = integrate(s, c, opt);
  CHECK(st.rejected >= 1);
  CHECK(st.tolerance_floor_hits == 0);
  const Real tol0 =
      c.abs_tol + c.rel_tol * std::sqrt(l2_norm_sq(ic_taylor_green(5)));
  CHECK(st.max_error_estimate <= tol0);
  CHECK(s.time == 0.05);
}

TEST_CASE("single-step interface agrees with the driver and signals rejection") {
  const ModelParams p{0.5, 0.0, 0.7, 3.0};
  StepperState a;
  a.field = ic_taylor_green(5);
  a.params = p;
  const StepControl c = fixed_control(1.0 / 64);

  const StepAttempt one = step(a, c);
  CHECK(one.accepted);
  CHECK(one.state.step_count == 1);

  StepperState b;
  b.field = ic_taylor_green(5);
  b.params = p;
  IntegrateOptions opt;
  opt.t_end = 1.0 / 64;
  integrate(b, c, opt);
  CHECK(max_coeff_diff(one.state.field, b.field) == 0.0);

  StepControl tight;
  tight.dt_init = 0.1;
  tight.dt_min = 1e-9;
  tight.dt_max = 0.1;
  tight.abs_tol = 1e-14;
  tight.rel_tol = 1e-12;
  StepperState r;
  r.field = ic_taylor_green(5);
  r.params = p;
  const StepAttempt rej = step(r, tight);
  CHECK_FALSE(rej.accepted);
  CHECK(rej.state.time == 0.0);
  CHECK(rej.state.step_count == 0);
  CHECK(rej.state.dt < 0.1);
  CHECK(max_coeff_diff(rej.state.field, r.field) == 0.0);
}

TEST_CASE("an advectively unstable run trips the blow-up guard") {
  // Near-inviscid vortex stepped far beyond the advective ceiling: the
  // explicit stages amplify grid-scale modes until the gradient guard fires.
  StepperState s;
  s.field = ic_taylor_green(8);
  s.params = ModelParams{1e-4, 0.0, 0.0, 3.0};
  StepControl c = fixed_control(1.0);
  c.blowup_factor = 10.0;
  IntegrateOptions opt;
  opt.t_end = 50.0;
  CHECK_THROWS_AS(integrate(s, c, opt), BlowupError);
}

TEST_CASE("invalid control windows are refused") {
  StepperState s;
  s.field = ic_shear(3);
  s.params = ModelParams{1.0, 0.0, 0.0, 3.0};
  IntegrateOptions opt;
  opt.t_end = 1.0;

  StepControl c = fixed_control(0.1);
  c.dt_min = 0.2; // dt_min > dt_max
  CHECK_THROWS_AS(integrate(s, c, opt), ConfigError);

  StepControl zero_tol = fixed_control(0.1);
  zero_tol.abs_tol = 0;
  zero_tol.rel_tol = 0;
  CHECK_THROWS_AS(integrate(s, zero_tol, opt), ConfigError);

  IntegrateOptions backwards;
  backwards.t_end = -1.0;
  CHECK_THROWS_AS(integrate(s, fixed_control(0.1), backwards), ConfigError);
}

TEST_CASE("observer samples expose the exact right-hand side") {
  StepperState s;
  s.field = ic_taylor_green(5);
  s.params = ModelParams{0.4, 0.2, 0.6, 3.0};

  SpectralField seen = SpectralField::zero(5);
  SpectralField state_at_sample = SpectralField::zero(5);
  IntegrateOptions opt;
  opt.t_end = 0.1;
  integrate(s, fixed_control(0.02), opt, [&](const Sample& sm) {
    seen = sm.dudt;
    state_at_sample = sm.u;
  });

  const RhsBreakdown b = rhs(state_at_sample, s.params);
  CHECK(max_coeff_diff(seen, b.total) < 1e-13);
}
