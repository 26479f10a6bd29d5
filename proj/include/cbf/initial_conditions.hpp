#pragma once

// Built-in initial velocity fields. All are divergence-free with zero mean.

#include <cstdint>

#include "cbf/field.hpp"

namespace cbf {

// u = (sin x cos y cos z, -cos x sin y cos z, 0): the classical single-cell
// vortex; ||u||^2 = 2 pi^3, ||grad u||^2 = 6 pi^3, max |u| = 1.
SpectralField ic_taylor_green(int K, int grid_n = 0);

// u = (sin y, 0, 0): a single shear mode with vanishing self-advection;
// ||u||^2 = ||grad u||^2 = 4 pi^3.
SpectralField ic_shear(int K, int grid_n = 0);

// u = (sin z + cos y, sin x + cos z, sin y + cos x): curl eigenfield.
SpectralField ic_beltrami(int K, int grid_n = 0);

// Random solenoidal field: independent complex Gaussian coefficients on the
// half-cube 1 <= max|k_i| <= K with shell amplitude = amplitude * |k|^slope,
// Hermitian completion, then divergence-free projection. The generator is a
// fixed 64-bit engine driven through an explicit uniform/Box-Muller path, so
// a seed pins the field bit-for-bit regardless of standard-library details.
// Doubling `amplitude` doubles every coefficient exactly.
SpectralField ic_random_spectrum(int K, std::uint64_t seed, Real slope,
                                 Real amplitude, int grid_n = 0);

}  // namespace cbf
