#pragma once

// Counter-based SplitMix64 streams. Value number i of stream (seed, id) is
// mix64(seed ^ golden * (2 id + 1) + golden * (i + 1)), so every stream is
// reproducible on any platform and streams never share state.

#include <cmath>
#include <cstdint>

namespace telesched::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : base_(mix64(seed ^ (kGolden * (2 * stream_id + 1)))) {}

  std::uint64_t next_u64() { return mix64(base_ + kGolden * ++counter_); }

  /// Uniform on (0, 1]; 53 random bits.
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Exp(rate) by inverse CDF.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  /// Uniform integer in [0, n), n >= 1, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

/// Seed for the i-th independent replication / sweep point.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + kGolden * (index + 1));
}

}  // namespace telesched::rng
