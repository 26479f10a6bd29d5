#include "cbf/operators.hpp"

#include <cmath>
#include <string>

namespace cbf {

void leray_project_in_place(SpectralField& f) {
  for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Real ksq = Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3;
    if (ksq == 0.0) {
      f.comp[0][i] = f.comp[1][i] = f.comp[2][i] = Complex(0, 0);
      return;
    }
    const Complex kdotu =
        Real(k1) * f.comp[0][i] + Real(k2) * f.comp[1][i] + Real(k3) * f.comp[2][i];
    const Complex scale = kdotu / ksq;
    f.comp[0][i] -= Real(k1) * scale;
    f.comp[1][i] -= Real(k2) * scale;
    f.comp[2][i] -= Real(k3) * scale;
  });
}

SpectralField leray_project(const SpectralField& f) {
  SpectralField g = f;
  leray_project_in_place(g);
  return g;
}

Real divergence_defect(const SpectralField& f) {
  Real worst = 0.0;
  for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Complex d =
        Real(k1) * f.comp[0][i] + Real(k2) * f.comp[1][i] + Real(k3) * f.comp[2][i];
    worst = std::max(worst, std::abs(d));
  });
  return worst;
}

void derivative_scalar(const SpectralArray& in, int K, int axis,
                       SpectralArray& out) {
  if (axis < 0 || axis > 2) throw ShapeError("derivative axis must be 0, 1, or 2");
  const int side = 2 * K + 1;
  out.resize(in.size());
  Eigen::Index i = 0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3, ++i) {
        const int k = axis == 0 ? k1 : (axis == 1 ? k2 : k3);
        out[i] = Complex(0, Real(k)) * in[i];
      }
  (void)side;
}

SpectralField derivative(const SpectralField& f, int axis) {
  SpectralField g = SpectralField::zero(f.K, f.grid_n);
  for (int c = 0; c < 3; ++c) derivative_scalar(f.comp[c], f.K, axis, g.comp[c]);
  return g;
}

SpectralField laplacian(const SpectralField& f) {
  SpectralField g = SpectralField::zero(f.K, f.grid_n);
  for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
    const Real ksq = Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3;
    for (int c = 0; c < 3; ++c) g.comp[c][i] = -ksq * f.comp[c][i];
  });
  return g;
}

SpectralField truncate_modes(const SpectralField& f, int n) {
  if (n < 1) throw ResolutionError("truncation radius must be >= 1");
  if (n > f.K)
    throw ResolutionError("truncation radius " + std::to_string(n) +
                          " exceeds stored mode radius " + std::to_string(f.K));
  SpectralField g = SpectralField::zero(n, 0);
  for (int c = 0; c < 3; ++c)
    for (int k1 = -n; k1 <= n; ++k1)
      for (int k2 = -n; k2 <= n; ++k2)
        for (int k3 = -n; k3 <= n; ++k3)
          g.at(c, k1, k2, k3) = f.at(c, k1, k2, k3);
  return g;
}

SpectralField embed_modes(const SpectralField& f, int K_target, int grid_n) {
  if (K_target < f.K)
    throw ResolutionError("embedding target smaller than source cube");
  SpectralField g = SpectralField::zero(K_target, grid_n);
  for (int c = 0; c < 3; ++c)
    for (int k1 = -f.K; k1 <= f.K; ++k1)
      for (int k2 = -f.K; k2 <= f.K; ++k2)
        for (int k3 = -f.K; k3 <= f.K; ++k3)
          g.at(c, k1, k2, k3) = f.at(c, k1, k2, k3);
  return g;
}

SpectralField parabolic_rescale(const SpectralField& f, int lambda,
                                int K_target) {
  if (lambda < 1) throw ResolutionError("rescale factor must be a positive integer");
  if (K_target == 0) K_target = lambda * f.K;
  if (K_target < lambda * f.K)
    throw ResolutionError("rescaled modes reach " + std::to_string(lambda * f.K) +
                          ", beyond target cube " + std::to_string(K_target));
  SpectralField g = SpectralField::zero(K_target, 0);
  const Real amp = Real(lambda);
  for (int c = 0; c < 3; ++c)
    for (int k1 = -f.K; k1 <= f.K; ++k1)
      for (int k2 = -f.K; k2 <= f.K; ++k2)
        for (int k3 = -f.K; k3 <= f.K; ++k3)
          g.at(c, lambda * k1, lambda * k2, lambda * k3) =
              amp * f.at(c, k1, k2, k3);
  return g;
}

}  // namespace cbf
