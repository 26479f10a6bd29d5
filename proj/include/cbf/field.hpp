#pragma once

// Velocity fields on the 2pi-periodic 3-torus.
//
// Spectral convention used throughout the project:
//
//     u(x) = sum_{|k_i| <= K} uhat(k) e^{i k.x},      uhat(-k) = conj(uhat(k)),
//     uhat(0) = 0                                      (zero spatial mean),
//     <f,g>  = integral over T^3 of f.g dx = (2pi)^3 sum_k fhat(k).conj(ghat(k)).
//
// Coefficients live on the full cube [-K,K]^3 per component; the Hermitian
// partner of every mode is stored explicitly so per-mode operations never
// branch on symmetry. All mode-space containers are Eigen arrays and all
// operations are free functions of their inputs.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>

#include "cbf/exceptions.hpp"

namespace cbf {

using Real = double;
using Complex = std::complex<Real>;
using SpectralArray = Eigen::ArrayX<Complex>;  // flattened (2K+1)^3 mode cube
using PhysicalArray = Eigen::ArrayX<Real>;     // flattened M^3 collocation grid

inline constexpr Real kTwoPi = 6.283185307179586476925286766559;
inline constexpr Real kDomainVolume = kTwoPi * kTwoPi * kTwoPi;  // |T^3|

// ---------------------------------------------------------------------------
// Model parameters:  du/dt - mu Lap(u) + (u.grad)u + grad p + alpha u
//                    + beta |u|^{r-1} u = 0,   div u = 0.
// ---------------------------------------------------------------------------
struct ModelParams {
  Real mu = 1.0;     // viscosity, > 0
  Real alpha = 0.0;  // linear drag coefficient, >= 0
  Real beta = 0.0;   // absorption strength, >= 0
  Real r = 3.0;      // absorption exponent, >= 1
};

void validate(const ModelParams& p);  // throws ConfigError on bad ranges

// Smallest FFT-friendly (2,3,5,7-smooth) integer >= n.
int next_fft_size(int n);

// Default collocation grid for a given mode radius: large enough to hold the
// modes with a free Nyquist band and to evaluate quadratic products alias-free.
int default_grid_size(int K);

// ---------------------------------------------------------------------------
// SpectralField: three components of Fourier coefficients on [-K,K]^3.
// ---------------------------------------------------------------------------
struct SpectralField {
  int K = 0;       // mode radius: coefficients for max_i |k_i| <= K
  int grid_n = 0;  // nominal collocation points per axis, >= 2K+2
  std::array<SpectralArray, 3> comp;

  static SpectralField zero(int K, int grid_n = 0);

  int side() const { return 2 * K + 1; }
  Eigen::Index n_modes() const {
    const Eigen::Index s = side();
    return s * s * s;
  }

  // Linear index of wavevector (k1,k2,k3); caller guarantees |k_i| <= K.
  Eigen::Index idx(int k1, int k2, int k3) const {
    const Eigen::Index s = side();
    return ((Eigen::Index)(k1 + K) * s + (k2 + K)) * s + (k3 + K);
  }
  Complex& at(int c, int k1, int k2, int k3) { return comp[c][idx(k1, k2, k3)]; }
  const Complex& at(int c, int k1, int k2, int k3) const {
    return comp[c][idx(k1, k2, k3)];
  }
};

// ---------------------------------------------------------------------------
// PhysicalField: three real components sampled on a uniform M^3 grid,
// x_j = (2pi/M) j, row-major over (j1,j2,j3).
// ---------------------------------------------------------------------------
struct PhysicalField {
  int M = 0;
  std::array<PhysicalArray, 3> comp;

  static PhysicalField zero(int M);
  Eigen::Index n_points() const { return (Eigen::Index)M * M * M; }
  Eigen::Index idx(int j1, int j2, int j3) const {
    return ((Eigen::Index)j1 * M + j2) * M + j3;
  }
};

// Shape checks used by binary operations.
void require_same_shape(const SpectralField& a, const SpectralField& b);

// Max-norm of the Hermitian-symmetry defect, max_k |uhat(k) - conj(uhat(-k))|.
Real hermitian_defect(const SpectralField& f);

// Overwrite each (k,-k) pair with its Hermitian average and zero the mean mode.
void enforce_hermitian(SpectralField& f);

// Visit every stored wavevector once: fn(k1, k2, k3, linear_index).
template <typename Fn>
void for_each_mode(const SpectralField& f, Fn&& fn) {
  const int K = f.K;
  Eigen::Index i = 0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) fn(k1, k2, k3, i++);
}

}  // namespace cbf
