#include "cbf/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "cbf/exceptions.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");
static_assert(sizeof(double) == 8);

namespace cbf {

namespace {

constexpr char kMagic[8] = {'C', 'B', 'F', '3', 'D', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 96;

template <class T>
void put(std::vector<unsigned char>& buf, std::size_t offset, const T& v) {
  std::memcpy(buf.data() + offset, &v, sizeof v);
}

template <class T>
T get(const std::vector<unsigned char>& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof v);
  return v;
}

} // namespace

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<unsigned char> checkpoint_bytes(const StepperState& s) {
  const std::ptrdiff_t modes = s.field.n_modes();
  const std::uint64_t payload = 3ull * std::uint64_t(modes) * 16;
  std::vector<unsigned char> buf(kHeaderBytes + payload);

  std::memcpy(buf.data(), kMagic, sizeof kMagic);
  put<std::uint32_t>(buf, 8, kVersion);
  put<std::uint32_t>(buf, 12, std::uint32_t(s.field.grid_n));
  put<std::uint32_t>(buf, 16, std::uint32_t(s.field.K));
  put<std::uint32_t>(buf, 20, 0);
  put<double>(buf, 24, s.params.mu);
  put<double>(buf, 32, s.params.alpha);
  put<double>(buf, 40, s.params.beta);
  put<double>(buf, 48, s.params.r);
  put<double>(buf, 56, s.time);
  put<double>(buf, 64, s.dt);
  put<std::uint64_t>(buf, 72, s.step_count);
  put<std::uint64_t>(buf, 80, payload);

  std::size_t off = kHeaderBytes;
  for (int c = 0; c < 3; ++c)
    for (std::ptrdiff_t i = 0; i < modes; ++i) {
      const Complex z = s.field.comp[c][i];
      put<double>(buf, off, z.real());
      put<double>(buf, off + 8, z.imag());
      off += 16;
    }

  put<std::uint64_t>(buf, 88, fnv1a64(buf.data() + kHeaderBytes, payload));
  return buf;
}

StepperState state_from_checkpoint_bytes(
    const std::vector<unsigned char>& buf) {
  if (buf.size() < kHeaderBytes)
    throw CheckpointError("checkpoint shorter than its header");
  if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
    throw CheckpointError("checkpoint magic mismatch");
  if (get<std::uint32_t>(buf, 8) != kVersion)
    throw CheckpointError("unsupported checkpoint version");

  const std::uint32_t grid_n = get<std::uint32_t>(buf, 12);
  const std::uint32_t K = get<std::uint32_t>(buf, 16);
  if (K < 1 || K > 4096) throw CheckpointError("implausible mode radius");

  StepperState s;
  s.params.mu = get<double>(buf, 24);
  s.params.alpha = get<double>(buf, 32);
  s.params.beta = get<double>(buf, 40);
  s.params.r = get<double>(buf, 48);
  s.time = get<double>(buf, 56);
  s.dt = get<double>(buf, 64);
  s.step_count = get<std::uint64_t>(buf, 72);
  validate(s.params);

  s.field = SpectralField::zero(int(K), int(grid_n));
  const std::ptrdiff_t modes = s.field.n_modes();
  const std::uint64_t payload = 3ull * std::uint64_t(modes) * 16;
  if (get<std::uint64_t>(buf, 80) != payload)
    throw CheckpointError("checkpoint payload size mismatch");
  if (buf.size() != kHeaderBytes + payload)
    throw CheckpointError("checkpoint truncated or padded");
  if (get<std::uint64_t>(buf, 88) !=
      fnv1a64(buf.data() + kHeaderBytes, payload))
    throw CheckpointError("checkpoint payload checksum mismatch");

  std::size_t off = kHeaderBytes;
  for (int c = 0; c < 3; ++c)
    for (std::ptrdiff_t i = 0; i < modes; ++i) {
      s.field.comp[c][i] =
          Complex(get<double>(buf, off), get<double>(buf, off + 8));
      off += 16;
    }
  return s;
}

void save_checkpoint(const StepperState& s, const std::string& path) {
  const std::vector<unsigned char> buf = checkpoint_bytes(s);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open checkpoint file: " + tmp);
    os.write(reinterpret_cast<const char*>(buf.data()),
             std::streamsize(buf.size()));
    if (!os) throw CheckpointError("short write to checkpoint file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CheckpointError("cannot move checkpoint into place: " + path);
}

StepperState load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw CheckpointError("cannot open checkpoint file: " + path);
  const std::streamsize n = is.tellg();
  is.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(n));
  is.read(reinterpret_cast<char*>(buf.data()), n);
  if (!is) throw CheckpointError("short read from checkpoint file: " + path);
  return state_from_checkpoint_bytes(buf);
}

} // namespace cbf
