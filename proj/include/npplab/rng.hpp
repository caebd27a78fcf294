#pragma once

#include <array>
#include <cstdint>

namespace npplab {

// Philox4x64-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Bit-compatible with numpy.random.Philox given the same key and counter.
using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

PhiloxCounter philox4x64(PhiloxCounter ctr, PhiloxKey key);

// Seed of the index-th independent substream of seed. Distinct (seed, index)
// pairs give unrelated streams; used for per-trial and per-replica draws.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// A counter-mode stream keyed by (seed, stream). Cheap to construct; the
// whole state is the key, a 64-bit block counter, and the buffered block.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  // Uniform on [0, bound), unbiased. bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller.
  double normal();

 private:
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace npplab
