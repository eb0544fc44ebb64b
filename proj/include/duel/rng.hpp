#pragma once

#include <cmath>
#include <cstdint>

namespace duel {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. A stream is addressed by (seed, replication,
/// lane) so any replication can be regenerated in isolation and the order in
/// which replications are executed has no effect on the values drawn.
class Stream {
 public:
  using result_type = std::uint64_t;

  constexpr Stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t lane = 0) noexcept
      : key_(mix64(mix64(seed ^ 0x243f6a8885a308d3ULL) ^ mix64(replication + 0x13198a2e03707344ULL) ^
                   mix64(lane + 0xa4093822299f31d0ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate, by inversion. Spelled out rather than
  /// using std::exponential_distribution so draws are identical across
  /// standard library implementations.
  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace duel
