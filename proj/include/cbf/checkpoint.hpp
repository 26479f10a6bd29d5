// Bit-exact binary snapshots of a trajectory state.
//
// Layout (all little-endian, 96-byte header):
//
//   offset  size  field
//   0       8     magic "CBF3DCK1"
//   8       4     format version (u32) = 1
//   12      4     collocation grid N (u32; 0 = resolution default)
//   16      4     truncation radius K (u32)
//   20      4     reserved (u32) = 0
//   24      8     mu    (f64)
//   32      8     alpha (f64)
//   40      8     beta  (f64)
//   48      8     r     (f64)
//   56      8     time  (f64)
//   64      8     next proposed dt (f64; 0 = controller default)
//   72      8     step count (u64)
//   80      8     payload size in bytes (u64)
//   88      8     FNV-1a 64-bit checksum of the payload (u64)
//   96      ...   payload
//
// Payload: the three velocity components blocked sequentially; within a
// component the coefficients run lexicographically over (k1, k2, k3) in
// [-K, K]^3, each as a (re, im) pair of f64. Total 3 (2K+1)^3 * 16 bytes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/stepper.hpp"

namespace cbf {

// FNV-1a 64-bit hash (offset basis 14695981039346656037, prime
// 1099511628211), as used for the payload checksum.
std::uint64_t fnv1a64(const unsigned char* data, std::size_t n);

// Serialize to/from the in-memory byte image.
std::vector<unsigned char> checkpoint_bytes(const StepperState& s);
StepperState state_from_checkpoint_bytes(const std::vector<unsigned char>& b);

// File round trip. save writes atomically (temp file + rename); load throws
// CheckpointError on bad magic, version, sizes, or checksum.
void save_checkpoint(const StepperState& s, const std::string& path);
StepperState load_checkpoint(const std::string& path);

} // namespace cbf
