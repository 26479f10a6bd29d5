#pragma once

// Per-mode linear operators on spectral fields.

#include "cbf/field.hpp"

namespace cbf {

// Orthogonal projection onto divergence-free, zero-mean fields:
//   (P u)hat(k) = uhat(k) - k (k.uhat(k)) / |k|^2,   (P u)hat(0) = 0.
// Idempotent, self-adjoint, L2-norm nonincreasing.
SpectralField leray_project(const SpectralField& f);
void leray_project_in_place(SpectralField& f);

// Max-norm of the divergence coefficients, max_k |k.uhat(k)|.
Real divergence_defect(const SpectralField& f);

// d/dx_axis: multiply component-wise by i k_axis (axis in {0,1,2}).
SpectralField derivative(const SpectralField& f, int axis);

// Single-component derivative on a flattened cube.
void derivative_scalar(const SpectralArray& in, int K, int axis,
                       SpectralArray& out);

// Laplacian: multiply by -|k|^2.
SpectralField laplacian(const SpectralField& f);

// Sharp mode-cube truncation: keep max_i |k_i| <= n, discard the rest.
// The result lives on the smaller cube. Throws ResolutionError if n > f.K
// or n < 1.
SpectralField truncate_modes(const SpectralField& f, int n);

// Zero-pad the mode cube into a larger one (inverse embedding of truncation).
SpectralField embed_modes(const SpectralField& f, int K_target, int grid_n = 0);

// Parabolic rescaling of a snapshot: u_lambda(x) = lambda u(lambda x), i.e.
// mode k of u lands on mode lambda*k with amplitude scaled by lambda.
// K_target = 0 means lambda * f.K (the smallest cube that holds the image);
// anything smaller throws ResolutionError.
SpectralField parabolic_rescale(const SpectralField& f, int lambda,
                                int K_target = 0);

}  // namespace cbf
