#pragma once

// Bridge between the mode cube and uniform collocation grids (FFTW backend).
//
// Planning uses FFTW_ESTIMATE only: measured planning picks transforms by
// wall-clock timing and can differ between two runs of the same binary, which
// would break bit-for-bit reproducibility of trajectories. Plans are cached
// per grid size behind a mutex and executed through the re-entrant new-array
// interface on thread-local scratch buffers, so concurrent workers share the
// cache without serializing their transforms. Callers never see the cache.

#include "cbf/field.hpp"

namespace cbf {

// Synthesis u(x_j) = sum_k uhat(k) exp(+i k.x_j) on an M^3 grid (imaginary
// residue of the Hermitian input is discarded). M = 0 means f.grid_n.
// Requires M >= 2K+1 so distinct modes stay distinct mod M.
PhysicalField to_physical(const SpectralField& f, int M = 0);

// Analysis uhat(k) = M^{-3} sum_j u(x_j) exp(-i k.x_j) for max_i |k_i| <= K.
// Exact inverse of to_physical for band-limited data; otherwise the tail
// aliases into the retained cube. grid_n = 0 means default_grid_size(K).
SpectralField to_spectral(const PhysicalField& g, int K, int grid_n = 0);

namespace fft {
// Single-component versions operating on flattened cubes/grids.
void modes_to_grid(const SpectralArray& cube, int K, int M, PhysicalArray& out);
void grid_to_modes(const PhysicalArray& grid, int M, int K, SpectralArray& out);
}  // namespace fft

}  // namespace cbf
