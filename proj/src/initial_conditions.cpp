#include "cbf/initial_conditions.hpp"

#include <cmath>
#include <random>

#include "cbf/operators.hpp"

namespace cbf {
namespace {

// Uniform in (0,1) from the top 53 bits; the +1/2 offset keeps 0 and 1 out.
Real u01(std::mt19937_64& eng) {
  return (Real((eng() >> 11)) + Real(0.5)) * 0x1p-53;
}

}  // namespace

SpectralField ic_taylor_green(int K, int grid_n) {
  SpectralField f = SpectralField::zero(K, grid_n);
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1})
      for (int s3 : {-1, 1}) {
        f.at(0, s1, s2, s3) = Complex(0, -Real(s1) / 8);  // sin x cos y cos z
        f.at(1, s1, s2, s3) = Complex(0, Real(s2) / 8);   // -cos x sin y cos z
      }
  return f;
}

SpectralField ic_shear(int K, int grid_n) {
  SpectralField f = SpectralField::zero(K, grid_n);
  f.at(0, 0, 1, 0) = Complex(0, -0.5);  // sin y
  f.at(0, 0, -1, 0) = Complex(0, 0.5);
  return f;
}

SpectralField ic_beltrami(int K, int grid_n) {
  SpectralField f = SpectralField::zero(K, grid_n);
  for (int s : {-1, 1}) {
    f.at(0, 0, 0, s) = Complex(0, -Real(s) / 2);  // sin z
    f.at(0, 0, s, 0) = Complex(0.5, 0);           // cos y
    f.at(1, s, 0, 0) = Complex(0, -Real(s) / 2);  // sin x
    f.at(1, 0, 0, s) = Complex(0.5, 0);           // cos z
    f.at(2, 0, s, 0) = Complex(0, -Real(s) / 2);  // sin y
    f.at(2, s, 0, 0) = Complex(0.5, 0);           // cos x
  }
  return f;
}

SpectralField ic_random_spectrum(int K, std::uint64_t seed, Real slope,
                                 Real amplitude, int grid_n) {
  SpectralField f = SpectralField::zero(K, grid_n);
  std::mt19937_64 eng(seed);
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) {
        const bool positive =
            k1 > 0 || (k1 == 0 && k2 > 0) || (k1 == 0 && k2 == 0 && k3 > 0);
        if (!positive) continue;
        const Real kabs =
            std::sqrt(Real(k1) * k1 + Real(k2) * k2 + Real(k3) * k3);
        const Real amp = amplitude * std::pow(kabs, slope);
        for (int c = 0; c < 3; ++c) {
          // Box-Muller on explicit uniforms; one complex Gaussian per draw.
          const Real rad = std::sqrt(-2 * std::log(u01(eng)));
          const Real ang = kTwoPi * u01(eng);
          const Complex g(rad * std::cos(ang), rad * std::sin(ang));
          f.at(c, k1, k2, k3) = amp * g;
          f.at(c, -k1, -k2, -k3) = std::conj(amp * g);
        }
      }
  leray_project_in_place(f);
  return f;
}

}  // namespace cbf
