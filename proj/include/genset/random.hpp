#pragma once

// Counter-based uniform variates: value i of stream `seed` is a pure
// function of (seed, i), so work can be split across threads freely.

#include <cstdint>

namespace genset {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// 64 random bits at position `counter` (SplitMix64 finaliser).
  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform on {lo, ..., hi} by multiply-shift; bias at most (hi - lo + 1) / 2^64.
  std::int64_t integer(std::uint64_t counter, std::int64_t lo, std::int64_t hi) const {
    const auto span = static_cast<unsigned __int128>(hi - lo + 1);
    return lo + static_cast<std::int64_t>((span * bits(counter)) >> 64);
  }

  /// Independent child stream.
  CounterRng child(std::uint64_t index) const { return CounterRng(bits(~index)); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace genset
