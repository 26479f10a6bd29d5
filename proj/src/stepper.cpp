#include "cbf/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbf/exceptions.hpp"
#include "cbf/norms.hpp"

namespace cbf {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

using ArrayR = Eigen::ArrayX<Real>;

// Diagonal symbol of the linear part, lam(k) = -(mu |k|^2 + alpha).
ArrayR linear_symbol(const SpectralField& u, const ModelParams& p) {
  ArrayR lam(u.n_modes());
  for_each_mode(u, [&](int k1, int k2, int k3, std::ptrdiff_t i) {
    const Real k2sum = Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3;
    lam(i) = -(p.mu * k2sum + p.alpha);
  });
  return lam;
}

struct ExpCache {
  Real dt = std::numeric_limits<Real>::quiet_NaN();
  ArrayR e_half, e_full;

  void refresh(const ArrayR& lam, Real new_dt) {
    if (new_dt == dt) return;
    dt = new_dt;
    e_half = (lam * (dt / 2)).exp();
    e_full = (lam * dt).exp();
  }
};

// Nonlinear evaluation in the signed convention of the dynamics module:
// the returned term is the full nonlinear contribution to du/dt, so the
// stages add it.
NonlinearEval eval_nonlinear(const SpectralField& u, const ModelParams& p,
                             const TermToggles& tg, std::uint64_t& count) {
  ++count;
  return nonlinear_term(u, p, tg);
}

struct AttemptResult {
  SpectralField trial;
  NonlinearEval end_eval; // nonlinear term at the trial state
  Real error_estimate = 0;
};

// Four integrating-factor stages plus the endpoint evaluation of the
// embedded pair. t1 is the nonlinear term at u (reused across retries).
AttemptResult attempt_step(const SpectralField& u, const SpectralField& t1,
                           Real dt, const ExpCache& e, const ModelParams& p,
                           const TermToggles& tg, std::uint64_t& evals) {
  const Real half = dt / 2;
  SpectralField stage = SpectralField::zero(u.K, u.grid_n);

  for (int c = 0; c < 3; ++c)
    stage.comp[c] = e.e_half * (u.comp[c] + half * t1.comp[c]);
  const SpectralField t2 = eval_nonlinear(stage, p, tg, evals).term;

  for (int c = 0; c < 3; ++c)
    stage.comp[c] = e.e_half * u.comp[c] + half * t2.comp[c];
  const SpectralField t3 = eval_nonlinear(stage, p, tg, evals).term;

  for (int c = 0; c < 3; ++c)
    stage.comp[c] = e.e_full * u.comp[c] + dt * (e.e_half * t3.comp[c]);
  const SpectralField t4 = eval_nonlinear(stage, p, tg, evals).term;

  AttemptResult out;
  out.trial = SpectralField::zero(u.K, u.grid_n);
  const Real sixth = dt / 6;
  for (int c = 0; c < 3; ++c)
    out.trial.comp[c] =
        e.e_full * u.comp[c] +
        sixth * (e.e_full * t1.comp[c] +
                 Real(2) * (e.e_half * (t2.comp[c] + t3.comp[c])) +
                 t4.comp[c]);

  out.end_eval = eval_nonlinear(out.trial, p, tg, evals);

  Real diff_sq = 0;
  for (int c = 0; c < 3; ++c)
    diff_sq += (out.end_eval.term.comp[c] - t4.comp[c]).abs2().sum();
  out.error_estimate = sixth * std::sqrt(kDomainVolume * diff_sq);
  return out;
}

Real controller_ratio(Real tol, Real est, const StepControl& c) {
  if (est <= 0) return c.grow;
  const Real raw = c.safety * std::pow(tol / est, 0.25);
  return std::clamp(raw, c.shrink, c.grow);
}

} // namespace

void StepControl::validate() const {
  if (!(dt_min > 0) || !(dt_max >= dt_min))
    throw ConfigError("step control requires 0 < dt_min <= dt_max");
  if (!(dt_init >= dt_min) || !(dt_init <= dt_max))
    throw ConfigError("dt_init must lie in [dt_min, dt_max]");
  if (!(abs_tol >= 0) || !(rel_tol >= 0) || (abs_tol == 0 && rel_tol == 0))
    throw ConfigError("error tolerances must be nonnegative and not both zero");
  if (!(safety > 0) || !(safety <= 1))
    throw ConfigError("safety factor must lie in (0, 1]");
  if (!(shrink > 0) || !(shrink < 1) || !(grow >= 1))
    throw ConfigError("step clamps require 0 < shrink < 1 <= grow");
  if (!(cfl_advective > 0) || !(cfl_zeroth > 0))
    throw ConfigError("stability constants must be positive");
  if (!(blowup_factor > 1))
    throw ConfigError("blow-up guard factor must exceed 1");
}

Real stability_bound(Real max_speed, int resolution, const ModelParams& p,
                     Real c1, Real c2) {
  Real bound = kInf;
  if (max_speed > 0 && resolution > 0)
    bound = std::min(bound, c1 / (resolution * max_speed));
  const Real damping =
      p.beta * std::pow(max_speed, p.r - 1) + p.alpha;
  if (damping > 0) bound = std::min(bound, c2 / damping);
  return bound;
}

Real stability_bound(const SpectralField& u, const ModelParams& p, Real c1,
                     Real c2) {
  return stability_bound(max_pointwise_speed(u), u.K, p, c1, c2);
}

StepAttempt step(const StepperState& s, const StepControl& c,
                 const TermToggles& toggles) {
  c.validate();
  validate(s.params);

  std::uint64_t evals = 0;
  const NonlinearEval nl = eval_nonlinear(s.field, s.params, toggles, evals);
  const Real ceiling =
      stability_bound(nl.max_speed, s.field.K, s.params, c.cfl_advective,
                      c.cfl_zeroth);

  Real dt = c.dt_min;
  if (!c.fixed_dt()) {
    dt = s.dt > 0 ? s.dt : c.dt_init;
    dt = std::max(std::min({dt, c.dt_max, ceiling}), c.dt_min);
  }

  const ArrayR lam = linear_symbol(s.field, s.params);
  ExpCache e;
  e.refresh(lam, dt);
  AttemptResult res =
      attempt_step(s.field, nl.term, dt, e, s.params, toggles, evals);

  const Real tol = c.abs_tol + c.rel_tol * std::sqrt(l2_norm_sq(s.field));
  StepAttempt out;
  out.dt_used = dt;
  out.error_estimate = res.error_estimate;

  if (!c.fixed_dt() && res.error_estimate > tol && dt > c.dt_min) {
    out.accepted = false;
    out.max_speed = nl.max_speed;
    out.state = s;
    out.state.dt = std::max(
        dt * std::max(controller_ratio(tol, res.error_estimate, c), c.shrink),
        c.dt_min);
    return out;
  }

  const Real grad_sq = gradient_norm_sq(res.trial);
  const Real grad_sq0 = gradient_norm_sq(s.field);
  if (grad_sq0 > 0 && grad_sq > c.blowup_factor * grad_sq0)
    throw BlowupError("gradient-energy guard exceeded", s.time + dt,
                      grad_sq);

  out.accepted = true;
  out.max_speed = res.end_eval.max_speed;
  out.state.field = std::move(res.trial);
  out.state.time = s.time + dt;
  out.state.step_count = s.step_count + 1;
  out.state.params = s.params;
  out.state.dt = c.fixed_dt()
                     ? c.dt_min
                     : std::clamp(dt * controller_ratio(tol, res.error_estimate,
                                                        c),
                                  c.dt_min, c.dt_max);
  return out;
}

IntegrateStats integrate(StepperState& s, const StepControl& c,
                         const IntegrateOptions& opt,
                         const Observer& observer) {
  c.validate();
  validate(s.params);
  if (opt.t_end < s.time)
    throw ConfigError("integration target precedes current time");
  if (opt.sample_cadence < 1)
    throw ConfigError("sample cadence must be at least 1");

  IntegrateStats stats;
  std::uint64_t evals = 0;

  const Real grad_sq0 = gradient_norm_sq(s.field);
  const Real guard = c.blowup_factor * grad_sq0;

  NonlinearEval nl = eval_nonlinear(s.field, s.params, opt.toggles, evals);

  if (observer && opt.record_initial) {
    const SpectralField dudt = time_derivative(s.field, nl.term, s.params);
    observer(Sample{s.time, s.step_count, 0, s.field, dudt, nl.max_speed, 0});
  }

  const ArrayR lam = linear_symbol(s.field, s.params);
  ExpCache e;
  Real dt_prop = c.fixed_dt()
                     ? c.dt_min
                     : std::clamp(s.dt > 0 ? s.dt : c.dt_init, c.dt_min,
                                  c.dt_max);

  while (s.time < opt.t_end) {
    const Real ceiling = stability_bound(nl.max_speed, s.field.K, s.params,
                                         c.cfl_advective, c.cfl_zeroth);
    Real dt = c.fixed_dt() ? c.dt_min
                           : std::max(std::min({dt_prop, c.dt_max, ceiling}),
                                      c.dt_min);
    const Real remaining = opt.t_end - s.time;
    const bool final_step = dt * (1 + 1e-8) >= remaining;
    if (final_step) dt = remaining;

    e.refresh(lam, dt);
    AttemptResult res =
        attempt_step(s.field, nl.term, dt, e, s.params, opt.toggles, evals);

    const Real energy_old = l2_norm_sq(s.field);
    const Real tol = c.abs_tol + c.rel_tol * std::sqrt(energy_old);

    if (!c.fixed_dt() && res.error_estimate > tol && dt > c.dt_min) {
      ++stats.rejected;
      dt_prop =
          std::max(dt * std::max(c.safety *
                                     std::pow(tol / res.error_estimate, 0.25),
                                 c.shrink),
                   c.dt_min);
      continue;
    }
    if (res.error_estimate > tol) ++stats.tolerance_floor_hits;

    const Real grad_sq = gradient_norm_sq(res.trial);
    if (grad_sq0 > 0 && grad_sq > guard)
      throw BlowupError("gradient-energy guard exceeded",
                        final_step ? opt.t_end : s.time + dt, grad_sq);

    // Dissipativity check: with zero forcing the scheme may raise the energy
    // only within the error estimate (plus summation roundoff).
    const Real energy_new = l2_norm_sq(res.trial);
    const Real slack = std::max(tol, res.error_estimate);
    const Real allowed = 2 * std::sqrt(energy_old) * slack + slack * slack +
                         32 * std::numeric_limits<Real>::epsilon() * energy_old;
    if (energy_new - energy_old > allowed)
      throw StepControlError("accepted step increased the kinetic energy "
                             "beyond the embedded error tolerance");

    s.field = std::move(res.trial);
    s.time = final_step ? opt.t_end : s.time + dt;
    ++s.step_count;
    nl = std::move(res.end_eval);

    ++stats.accepted;
    stats.last_dt = dt;
    stats.max_error_estimate =
        std::max(stats.max_error_estimate, res.error_estimate);

    if (!c.fixed_dt())
      dt_prop = std::clamp(dt * controller_ratio(tol, res.error_estimate, c),
                           c.dt_min, c.dt_max);
    s.dt = dt_prop;

    if (observer &&
        (final_step ||
         s.step_count % static_cast<std::uint64_t>(opt.sample_cadence) == 0)) {
      const SpectralField dudt = time_derivative(s.field, nl.term, s.params);
      observer(Sample{s.time, s.step_count, dt, s.field, dudt, nl.max_speed,
                      res.error_estimate});
    }
  }

  stats.nonlinear_evals = evals;
  stats.t_final = s.time;
  return stats;
}

} // namespace cbf
