// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace indsel {

// Packed binary feature matrix. Stored column-major: each column is a
// contiguous run of 64-bit words over the instances, so class-conditional
// counting, mutual information and per-feature cache updates are sequential
// word scans and popcounts. (The on-disk format is row-major; see io.)
// Bits past `rows` in the last word of a column are kept zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_col_((rows + 63) / 64),
        words_(words_per_col_ * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_col() const { return words_per_col_; }

  bool get(std::size_t i, std::size_t p) const {
    return (words_[p * words_per_col_ + (i >> 6)] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, std::size_t p, bool v) {
    std::uint64_t& w = words_[p * words_per_col_ + (i >> 6)];
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v) w |= m; else w &= ~m;
  }

  std::span<const std::uint64_t> column(std::size_t p) const {
    return {words_.data() + p * words_per_col_, words_per_col_};
  }
  std::span<std::uint64_t> column_mut(std::size_t p) {
    return {words_.data() + p * words_per_col_, words_per_col_};
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0, words_per_col_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::size_t popcount_words(std::span<const std::uint64_t> a) {
  std::size_t n = 0;
  for (std::uint64_t w : a) n += std::popcount(w);
  return n;
}

inline std::size_t popcount_and(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(a[i] & b[i]);
  return n;
}

inline std::size_t popcount_andnot(std::span<const std::uint64_t> a,
                                   std::span<const std::uint64_t> b) {
  // ones of a that are zeros of b; callers keep tail bits of both clear
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(a[i] & ~b[i]);
  return n;
}

}  // namespace indsel
