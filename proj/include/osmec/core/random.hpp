#pragma once

#include <cstdint>
#include <random>

namespace osmec {

/// Seeded random source. Only the mt19937_64 engine is used (its output
/// sequence is pinned by the standard); the derived draws below avoid
/// std::uniform_*_distribution, whose results differ between standard
/// library implementations.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], multiply-shift mapping.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const unsigned __int128 wide = static_cast<unsigned __int128>(engine_()) * span;
    return lo + static_cast<std::int64_t>(wide >> 64);
  }

  /// Multiplicative jitter factor in [1-pct/100, 1+pct/100].
  double jitter_factor(double pct) {
    if (pct <= 0.0) return 1.0;
    return 1.0 + (2.0 * uniform01() - 1.0) * (pct / 100.0);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace osmec
