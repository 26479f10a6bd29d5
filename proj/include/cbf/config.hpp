// Run description files.
//
// Format: flat "key = value" lines grouped under [section] headers; '#' and
// ';' start comments; blank lines are ignored. Sections and keys may appear
// in any order, each key at most once. parse_config reports malformed lines,
// unknown sections or keys, duplicates, and unparseable values with their
// line numbers. serialize_config emits the canonical form -- fixed section
// and key order, reals printed with %.17g so every double round-trips
// exactly -- and serialize(parse(s)) == s whenever s is canonical.
//
// Canonical layout (initial-condition parameters appear only for the
// random_spectrum kind):
//
//   [model]      mu, alpha, beta, r
//   [resolution] K, N
//   [time]       T, dt_init, dt_min, dt_max, abs_tol, rel_tol, blowup_factor
//   [ic]         kind (, seed, slope, amplitude)
//   [output]     sample_cadence, checkpoint_cadence
#pragma once

#include <cstdint>
#include <string>

#include "cbf/field.hpp"
#include "cbf/stepper.hpp"

namespace cbf {

enum class IcKind { taylor_green, shear, beltrami, random_spectrum };

const char* ic_kind_name(IcKind kind);

struct IcSpec {
  IcKind kind = IcKind::taylor_green;
  // random_spectrum parameters; rejected under any other kind.
  std::uint64_t seed = 1;
  Real slope = -2.0;
  Real amplitude = 1.0;
};

struct RunConfig {
  ModelParams params;
  int K = 10;        // spectral truncation radius
  int N = 32;        // collocation grid for the convective sweep
  Real T = 0.5;      // final time; T = 0 records the initial state only
  StepControl control;
  IcSpec ic;
  int sample_cadence = 1;     // ledger row every n-th accepted step
  int checkpoint_cadence = 0; // checkpoint every n-th accepted step; 0 = final only
};

// Parse + range-check. Throws ConfigError with a line-numbered message.
RunConfig parse_config(const std::string& text);

// File wrapper; prefixes messages with the path.
RunConfig load_config(const std::string& path);

std::string serialize_config(const RunConfig& cfg);

// Range checks: model parameters via validate(ModelParams), K >= 1,
// N >= 2K+2 when r <= 3 (N >= 2K+1 otherwise), step-control sanity with
// strictly positive tolerances, T >= 0, cadences in range.
void validate(const RunConfig& cfg);

// Build the configured initial state at (K, grid_n = N).
SpectralField initial_condition(const RunConfig& cfg);

} // namespace cbf
