#pragma once

#include <stdexcept>
#include <string>

namespace cbf {

// Error taxonomy. Every throw site uses one of these so the CLI can map
// failure classes to distinct exit codes.

// Bad run configuration: unknown key, malformed line, out-of-range value,
// inconsistent grid/mode sizes.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested mode cube does not fit the target resolution.
struct ResolutionError : std::runtime_error {
  explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Field/grid shape mismatch between operands (different K, grid size, or
// sample times).
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint file rejected: bad magic, unsupported version, truncated
// payload, or checksum mismatch.
struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

// The adaptive controller cannot satisfy the error tolerance at dt_min.
struct StepControlError : std::runtime_error {
  explicit StepControlError(const std::string& msg) : std::runtime_error(msg) {}
};

// Gradient-energy guard tripped: the trajectory is treated as blown up.
struct BlowupError : std::runtime_error {
  BlowupError(const std::string& msg, double t, double grad_sq)
      : std::runtime_error(msg), time(t), grad_sq(grad_sq) {}
  double time;
  double grad_sq;
};

// Ledger misuse or malformed ledger data: non-monotone sample times,
// unparsable rows, or a monitor invoked outside its exponent range.
struct LedgerError : std::runtime_error {
  explicit LedgerError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical verification (audit, identity, inequality) failed.
struct VerificationError : std::runtime_error {
  explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cbf
