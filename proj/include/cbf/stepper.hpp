// Time integration of the truncated system
//
//   du/dt = L u + N(u),   L = -(mu |k|^2 + alpha)   (diagonal in mode space),
//   N(u)  = -P[(u.grad)u] - P[beta |u|^{r-1} u],
//
// with the integrating-factor form of the classical four-stage explicit
// Runge-Kutta scheme: the linear part is advanced by the exact factor
// exp(L dt), so a field with N == 0 decays exactly (to roundoff) per step.
// A fifth nonlinear evaluation at the accepted endpoint yields an embedded
// third-order companion whose defect (dt/6)(k4 - k5) drives the adaptive
// controller; the same evaluation is reused as stage one of the next step
// and handed to observers so that per-step diagnostics cost no extra
// transforms.
#pragma once

#include <cstdint>
#include <functional>

#include "cbf/dynamics.hpp"
#include "cbf/field.hpp"

namespace cbf {

// Adaptive step-control parameters. dt_min == dt_max selects fixed-step
// mode: the controller neither rejects nor resizes, and only the final
// landing step may be shorter.
struct StepControl {
  Real dt_init = 1e-3;
  Real dt_min = 1e-7;
  Real dt_max = 1e-1;
  Real abs_tol = 1e-10;     // absolute L2 error tolerance per step
  Real rel_tol = 1e-8;      // relative to ||u||_{L2}
  Real safety = 0.9;        // controller safety factor
  Real shrink = 0.2;        // max step reduction per adjustment
  Real grow = 2.0;          // max step growth per adjustment
  Real cfl_advective = 1.0; // c1 in c1 / (K max|u|)
  Real cfl_zeroth = 1.0;    // c2 in c2 / (beta max|u|^{r-1} + alpha)
  Real blowup_factor = 1e6; // guard: ||grad u||^2 <= factor * initial value

  bool fixed_dt() const { return dt_min == dt_max; }
  void validate() const; // throws ConfigError
};

// Discrete trajectory point. `dt` is the proposal for the next attempt
// (always within [dt_min, dt_max]); the step that produced this state is
// reported through the observer sample instead.
struct StepperState {
  SpectralField field;
  Real time = 0;
  Real dt = 0; // 0 = start from StepControl::dt_init
  std::uint64_t step_count = 0;
  ModelParams params;
};

// Snapshot handed to observers after an accepted step (and optionally for
// the initial state, with dt == 0). References are valid only during the
// call. `dudt` is the full right-hand side at (t, u), assembled from the
// same nonlinear evaluation the scheme itself uses.
struct Sample {
  Real t = 0;
  std::uint64_t step = 0;
  Real dt = 0;
  const SpectralField& u;
  const SpectralField& dudt;
  Real max_speed = 0;
  Real error_estimate = 0;
};

using Observer = std::function<void(const Sample&)>;

struct IntegrateOptions {
  Real t_end = 0;
  TermToggles toggles{};
  int sample_cadence = 1;     // observer every n-th accepted step
  bool record_initial = true; // emit a dt == 0 sample before stepping
};

struct IntegrateStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t nonlinear_evals = 0;
  std::uint64_t tolerance_floor_hits = 0; // accepted with estimate > tolerance
  Real t_final = 0;
  Real last_dt = 0;               // dt of the last accepted step
  Real max_error_estimate = 0;    // largest accepted embedded estimate
};

// Explicit-stability ceiling min(c1 / (K max|u|), c2 / (beta max|u|^{r-1} +
// alpha)); +infinity when both denominators vanish (callers clamp to
// dt_max). The field overload measures max|u| on the dealiased product grid.
Real stability_bound(Real max_speed, int resolution, const ModelParams& p,
                     Real c1 = 1.0, Real c2 = 1.0);
Real stability_bound(const SpectralField& u, const ModelParams& p,
                     Real c1 = 1.0, Real c2 = 1.0);

// One attempted step from `s` at the state's proposed dt (clamped to the
// control window and stability ceiling). On rejection the returned state is
// the input with a reduced proposal.
struct StepAttempt {
  StepperState state;
  bool accepted = false;
  Real dt_used = 0;
  Real error_estimate = 0;
  Real max_speed = 0; // at the new state when accepted, else at the old one
};
StepAttempt step(const StepperState& s, const StepControl& c,
                 const TermToggles& toggles = {});

// Advance s.field from s.time to t_end, invoking the observer at the
// configured cadence and always on the landing step. The final step is
// shortened to land exactly on t_end. Throws BlowupError when ||grad u||^2
// exceeds blowup_factor times its initial value and StepControlError when an
// accepted step increases ||u||^2 beyond the error tolerance; rows already
// handed to observers are unaffected.
IntegrateStats integrate(StepperState& s, const StepControl& c,
                         const IntegrateOptions& opt,
                         const Observer& observer = {});

} // namespace cbf
