#include "cbf/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cbf {

void validate(const ModelParams& p) {
  if (!(p.mu > 0.0)) throw ConfigError("mu must be > 0");
  if (!(p.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(p.beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(p.r >= 1.0)) throw ConfigError("r must be >= 1");
  for (Real v : {p.mu, p.alpha, p.beta, p.r})
    if (!std::isfinite(v)) throw ConfigError("model parameter not finite");
}

int next_fft_size(int n) {
  // Smallest integer >= n whose factorization uses only 2, 3, 5, 7.
  if (n < 1) return 1;
  for (int m = n;; ++m) {
    int v = m;
    for (int f : {2, 3, 5, 7})
      while (v % f == 0) v /= f;
    if (v == 1) return m;
  }
}

int default_grid_size(int K) {
  // Needs a free Nyquist band (M >= 2K+2) and room for alias-free quadratic
  // products (M >= 3K+2, the 3/2 padding of the 2K+1 mode band).
  const int need = std::max(2 * K + 2, 3 * K + 2);
  return next_fft_size(need);
}

SpectralField SpectralField::zero(int K, int grid_n) {
  if (K < 1) throw ResolutionError("mode radius K must be >= 1");
  SpectralField f;
  f.K = K;
  f.grid_n = grid_n > 0 ? grid_n : default_grid_size(K);
  if (f.grid_n < 2 * K + 2)
    throw ResolutionError("grid size " + std::to_string(f.grid_n) +
                          " cannot hold modes up to K=" + std::to_string(K));
  for (auto& c : f.comp) c = SpectralArray::Zero(f.n_modes());
  return f;
}

PhysicalField PhysicalField::zero(int M) {
  if (M < 1) throw ResolutionError("grid size must be >= 1");
  PhysicalField g;
  g.M = M;
  for (auto& c : g.comp) c = PhysicalArray::Zero(g.n_points());
  return g;
}

void require_same_shape(const SpectralField& a, const SpectralField& b) {
  if (a.K != b.K)
    throw ShapeError("mode radius mismatch: " + std::to_string(a.K) + " vs " +
                     std::to_string(b.K));
}

Real hermitian_defect(const SpectralField& f) {
  Real worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
      const Complex v = f.comp[c][i];
      const Complex w = f.at(c, -k1, -k2, -k3);
      worst = std::max(worst, std::abs(v - std::conj(w)));
    });
  }
  return worst;
}

void enforce_hermitian(SpectralField& f) {
  for (int c = 0; c < 3; ++c) {
    for_each_mode(f, [&](int k1, int k2, int k3, Eigen::Index i) {
      // Visit each unordered pair once (lexicographically positive side).
      const bool positive =
          k1 > 0 || (k1 == 0 && k2 > 0) || (k1 == 0 && k2 == 0 && k3 > 0);
      if (!positive) return;
      Complex& v = f.comp[c][i];
      Complex& w = f.comp[c][f.idx(-k1, -k2, -k3)];
      const Complex avg = Real(0.5) * (v + std::conj(w));
      v = avg;
      w = std::conj(avg);
    });
    f.comp[c][f.idx(0, 0, 0)] = Complex(0, 0);
  }
}

}  // namespace cbf
