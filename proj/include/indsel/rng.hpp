// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace indsel {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 because the
// whole sequence, including the Gaussian draws below, is specified by this
// header alone and therefore reproducible across compilers and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive on both ends. Modulo reduction; the bias is ~range/2^64 and
  // irrelevant at the range sizes used here (series lengths, indices).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    return lo + next() % (hi - lo + 1);
  }

  // Box-Muller from two fresh 64-bit draws; u1 is kept away from 0 so the log
  // is finite. No spare caching: one normal consumes exactly two draws.
  double gaussian(double mean = 0.0, double stddev = 1.0) {
    const double u1 = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * r * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Stream derivation: two SplitMix64 finalizer rounds over (seed, stream) so
// that distinct stream ids give statistically independent generators.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
  const std::uint64_t a = g.next();
  return a ^ g.next();
}

inline SplitMix64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(mix64(seed, stream));
}

}  // namespace indsel
