#pragma once

#include <cstdint>
#include <limits>

namespace hyerslab {

/// SplitMix64 (Steele, Lea, Flood 2014) with its published constants.
///
/// Chosen over the <random> engines + distributions because the standard
/// distributions are not specified bit-for-bit, and every report this
/// library writes must be reproducible across toolchains.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent child stream; advances this generator by one step.
  constexpr SplitMix64 split() noexcept { return SplitMix64(mix((*this)() ^ 0xD1B54A32D192ED03ULL)); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

/// Order-sensitive hash combiner on top of the SplitMix64 finalizer.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return SplitMix64::mix(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

}  // namespace hyerslab
