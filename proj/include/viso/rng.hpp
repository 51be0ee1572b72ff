#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace viso {

/// Portable deterministic PRNG (SplitMix64). The integer stream is fully
/// specified by the two mixing constants, so seeded runs reproduce across
/// platforms; floating-point draws inherit at most libm ulp differences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [lo, hi], bounds inclusive.
  int uniform_int(int lo, int hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % range);
  }

  /// Box-Muller; consumes exactly two unit draws per call (no cached spare,
  /// which keeps the stream position a pure function of the call count).
  double normal(double mean, double stddev) {
    double u1 = next_unit();
    const double u2 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed for a named substream.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed ^ (salt * 0x9E3779B97F4A7C15ull);
}

}  // namespace viso
