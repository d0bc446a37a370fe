#include "sglv/rng.hpp"

#include <cmath>

#include "sglv/error.hpp"

namespace sglv {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kStreamBits = 40;  // draws per stream: 2^40

inline std::uint64_t splitmix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  if (stream_id >= (1ull << (64 - kStreamBits)))
    throw Error(ErrorCode::kRange, "stream_id exceeds 2^24 - 1");
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t key = splitmix64(seed_ + kGolden);
  const std::uint64_t counter = (stream_id_ << kStreamBits) | counter_;
  ++counter_;
  return splitmix64(key ^ (counter * kGolden));
}

double RngStream::uniform01() {
  // 53-bit mantissa, shifted into (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kRange, "uniform_index bound must be positive");
  // Multiply-shift: floor(u64 * bound / 2^64), bias negligible for bound << 2^64.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

void RngStream::fill_standard_normals(double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = standard_normal();
}

std::vector<double> standard_normals(RngStream& rng, std::size_t count) {
  std::vector<double> out(count);
  rng.fill_standard_normals(out.data(), count);
  return out;
}

}  // namespace sglv
