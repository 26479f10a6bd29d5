#include "cbf/transform.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <string>
#include <unordered_map>

namespace cbf {
namespace {

// One cached plan pair per grid size. The buffers the plans were created on
// are kept only to pin an alignment class; execution always happens on
// thread-local scratch with the same (fftw_malloc) alignment.
struct PlanEntry {
  fftw_plan forward = nullptr;   // exp(-i k.x), unnormalized
  fftw_plan backward = nullptr;  // exp(+i k.x)
  fftw_complex* a = nullptr;
  fftw_complex* b = nullptr;
  ~PlanEntry() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (a) fftw_free(a);
    if (b) fftw_free(b);
  }
};

std::mutex g_plan_mutex;

const PlanEntry& plan_for(int M) {
  static std::unordered_map<int, PlanEntry>* cache =
      new std::unordered_map<int, PlanEntry>;  // leaked on purpose: plans must
                                               // outlive all static consumers
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache->find(M);
  if (it != cache->end()) return it->second;
  PlanEntry& e = (*cache)[M];
  const std::size_t n = (std::size_t)M * M * M;
  e.a = fftw_alloc_complex(n);
  e.b = fftw_alloc_complex(n);
  e.forward = fftw_plan_dft_3d(M, M, M, e.a, e.b, FFTW_FORWARD, FFTW_ESTIMATE);
  e.backward = fftw_plan_dft_3d(M, M, M, e.a, e.b, FFTW_BACKWARD, FFTW_ESTIMATE);
  return e;
}

// Thread-local scratch, reused across calls, released at thread exit.
struct Scratch {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
};
struct ScratchPool {
  std::unordered_map<int, Scratch> by_size;
  ~ScratchPool() {
    for (auto& [m, s] : by_size) {
      fftw_free(s.in);
      fftw_free(s.out);
    }
  }
  Scratch& get(int M) {
    Scratch& s = by_size[M];
    if (!s.in) {
      const std::size_t n = (std::size_t)M * M * M;
      s.in = fftw_alloc_complex(n);
      s.out = fftw_alloc_complex(n);
    }
    return s;
  }
};

Scratch& scratch_for(int M) {
  thread_local ScratchPool pool;
  return pool.get(M);
}

inline int wrap(int k, int M) { return k >= 0 ? k : k + M; }

}  // namespace

namespace fft {

void modes_to_grid(const SpectralArray& cube, int K, int M, PhysicalArray& out) {
  if (M < 2 * K + 1)
    throw ResolutionError("grid " + std::to_string(M) + " too small for K=" +
                          std::to_string(K));
  const PlanEntry& plans = plan_for(M);
  Scratch& s = scratch_for(M);
  const std::size_t n = (std::size_t)M * M * M;
  std::memset(s.in, 0, n * sizeof(fftw_complex));

  const int side = 2 * K + 1;
  for (int k1 = -K; k1 <= K; ++k1) {
    const std::size_t o1 = (std::size_t)wrap(k1, M) * M;
    for (int k2 = -K; k2 <= K; ++k2) {
      const std::size_t o2 = (o1 + wrap(k2, M)) * M;
      const Eigen::Index base =
          ((Eigen::Index)(k1 + K) * side + (k2 + K)) * side;
      for (int k3 = -K; k3 <= K; ++k3) {
        const Complex v = cube[base + (k3 + K)];
        fftw_complex& dst = s.in[o2 + wrap(k3, M)];
        dst[0] = v.real();
        dst[1] = v.imag();
      }
    }
  }

  fftw_execute_dft(plans.backward, s.in, s.out);

  out.resize((Eigen::Index)n);
  for (std::size_t j = 0; j < n; ++j) out[(Eigen::Index)j] = s.out[j][0];
}

void grid_to_modes(const PhysicalArray& grid, int M, int K, SpectralArray& out) {
  if (M < 2 * K + 1)
    throw ResolutionError("grid " + std::to_string(M) + " too small for K=" +
                          std::to_string(K));
  if (grid.size() != (Eigen::Index)M * M * M)
    throw ShapeError("grid array size does not match M^3");
  const PlanEntry& plans = plan_for(M);
  Scratch& s = scratch_for(M);
  const std::size_t n = (std::size_t)M * M * M;
  for (std::size_t j = 0; j < n; ++j) {
    s.in[j][0] = grid[(Eigen::Index)j];
    s.in[j][1] = 0.0;
  }

  fftw_execute_dft(plans.forward, s.in, s.out);

  const Real scale = Real(1) / (Real(M) * Real(M) * Real(M));
  const int side = 2 * K + 1;
  out.resize((Eigen::Index)side * side * side);
  for (int k1 = -K; k1 <= K; ++k1) {
    const std::size_t o1 = (std::size_t)wrap(k1, M) * M;
    for (int k2 = -K; k2 <= K; ++k2) {
      const std::size_t o2 = (o1 + wrap(k2, M)) * M;
      const Eigen::Index base =
          ((Eigen::Index)(k1 + K) * side + (k2 + K)) * side;
      for (int k3 = -K; k3 <= K; ++k3) {
        const fftw_complex& src = s.out[o2 + wrap(k3, M)];
        out[base + (k3 + K)] = Complex(src[0] * scale, src[1] * scale);
      }
    }
  }
}

}  // namespace fft

PhysicalField to_physical(const SpectralField& f, int M) {
  if (M == 0) M = f.grid_n;
  PhysicalField g = PhysicalField::zero(M);
  for (int c = 0; c < 3; ++c) fft::modes_to_grid(f.comp[c], f.K, M, g.comp[c]);
  return g;
}

SpectralField to_spectral(const PhysicalField& g, int K, int grid_n) {
  SpectralField f = SpectralField::zero(K, grid_n);
  for (int c = 0; c < 3; ++c) fft::grid_to_modes(g.comp[c], g.M, K, f.comp[c]);
  return f;
}

}  // namespace cbf
