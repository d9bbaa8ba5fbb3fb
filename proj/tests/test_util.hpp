// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "indsel/indicators.hpp"
#include "indsel/rng.hpp"

namespace indsel::test {

// Random binary dataset with every class present; grid left default (tests
// that need a real grid binarize real series instead).
inline BinaryDataset random_bits(std::size_t n, std::size_t p, int k, std::uint64_t seed) {
  BinaryDataset data;
  data.class_count = k;
  data.bits = BitMatrix(n, p);
  data.labels.resize(n);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    data.labels[i] = static_cast<ClassLabel>(i < static_cast<std::size_t>(k)
                                                 ? i
                                                 : rng.uniform_int(0, k - 1));
  for (std::size_t j = 0; j < p; ++j) {
    const double density = 0.1 + 0.8 * rng.uniform01();
    // weak class association so features carry signal
    const int favored = static_cast<int>(rng.uniform_int(0, k - 1));
    for (std::size_t i = 0; i < n; ++i) {
      double d = density;
      if (data.labels[i] == favored) d = std::min(0.95, density + 0.2);
      if (rng.uniform01() < d) data.bits.set(i, j, true);
    }
  }
  return data;
}

inline std::vector<double> gaussian_sample(std::size_t n, double mean, double sd,
                                           SplitMix64& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.gaussian(mean, sd);
  return out;
}

}  // namespace indsel::test
