#pragma once

#include <cstdint>
#include <random>

namespace cdmgen {

/// Seeded random stream. Uniform and normal variates are produced by our own
/// transforms of std::mt19937_64 output so sequences match across standard libraries.
///
/// Sub-streams: `derive(i)` depends only on the construction seed and `i`, never on
/// how many values were already drawn, so work split by index is independent of
/// scheduling. Functions that need sub-streams call `fork()` first, which consumes
/// one draw from the parent and returns a fresh base stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  RandomStream derive(std::uint64_t index) const;
  RandomStream fork();

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cdmgen
