#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace sglv {

// Counter-based random stream. State is (seed, stream_id, counter); each draw
// finalizes key + counter * golden with the splitmix64 mixer, so the sequence
// is a pure function of its coordinates and identical on every platform.
//
// Stream layout: the 64-bit counter is (stream_id << 40) | draw_index, which
// gives 2^24 streams of 2^40 draws with counter spaces disjoint by
// construction (one replicate per stream never collides with another).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Raw 64-bit draw.
  std::uint64_t next_u64();

  // Uniform on (0, 1]; never returns 0 so log(u) is always finite.
  double uniform01();

  // Standard normal via Box-Muller with a cached spare.
  double standard_normal();

  // Uniform integer in [0, bound). bound must be >= 1.
  std::uint64_t uniform_index(std::uint64_t bound);

  void fill_standard_normals(double* out, std::size_t count);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// numerics contract: deterministic standard normals for (seed, stream_id).
std::vector<double> standard_normals(RngStream& rng, std::size_t count);

}  // namespace sglv
