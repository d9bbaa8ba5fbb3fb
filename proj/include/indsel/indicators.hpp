// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "indsel/bitmatrix.hpp"
#include "indsel/datagen.hpp"
#include "indsel/stats.hpp"

namespace indsel {

using ClassLabel = std::uint8_t;

// One binary feature: fires when its score's p-value is <= threshold.
struct IndicatorSpec {
  ScoreSpec score;
  double threshold = 0.05;  // strictly inside (0, 1)
};

// Grid coordinates of an indicator: q = score family, p = parameter index
// over (window, confirmation), t = threshold index.
struct GridCoord {
  int q = 0, p = 0, t = 0;
};

// The full Cartesian product families x windows x confirmations x thresholds,
// in that fixed nesting order (thresholds innermost, ascending). Column order
// is part of the contract: every persisted artifact refers to features by
// their position here.
class IndicatorGrid {
 public:
  IndicatorGrid() = default;

  static IndicatorGrid build(std::vector<TestFamily> families, std::vector<int> windows,
                             std::vector<double> thresholds, std::vector<bool> confirmations);

  std::size_t size() const { return indicators_.size(); }
  const IndicatorSpec& operator[](std::size_t j) const { return indicators_[j]; }
  const GridCoord& coord(std::size_t j) const { return coords_[j]; }

  const std::vector<TestFamily>& families() const { return families_; }
  const std::vector<int>& windows() const { return windows_; }
  const std::vector<double>& thresholds() const { return thresholds_; }
  const std::vector<bool>& confirmations() const { return confirmations_; }

  std::uint64_t fingerprint() const;
  std::string to_json_string() const;
  static IndicatorGrid from_json_string(const std::string& text);

  friend bool operator==(const IndicatorGrid& a, const IndicatorGrid& b) {
    return a.families_ == b.families_ && a.windows_ == b.windows_ &&
           a.thresholds_ == b.thresholds_ && a.confirmations_ == b.confirmations_;
  }

 private:
  std::vector<TestFamily> families_;
  std::vector<int> windows_;
  std::vector<double> thresholds_;
  std::vector<bool> confirmations_;
  std::vector<IndicatorSpec> indicators_;
  std::vector<GridCoord> coords_;
};

// N x P bit matrix plus labels: the universe feature selection operates on.
struct BinaryDataset {
  BitMatrix bits;
  std::vector<ClassLabel> labels;
  IndicatorGrid grid;
  int class_count = kNumClasses;

  std::size_t rows() const { return bits.rows(); }
  std::size_t cols() const { return bits.cols(); }
};

// bit(i, j) = 1 iff apply_score(series_i, grid[j].score) <= grid[j].threshold.
// Each unique (family, window, confirmation) score is evaluated once per
// series and shared across its thresholds. Parallel over series; output is
// independent of thread count.
BinaryDataset binarize(const LabeledSeriesSet& series_set, const IndicatorGrid& grid);

// New dataset holding the given rows (in the given order); grid is shared.
BinaryDataset subset_rows(const BinaryDataset& data, std::span<const std::size_t> indices);

// Compact binary persistence: magic, version, N, P, K, row-major packed bits,
// label bytes; the grid travels in a <path>.grid.json sidecar.
void save_bits(const BinaryDataset& data, const std::string& path);
BinaryDataset load_bits(const std::string& path);

// Plain CSV (one row per instance: P 0/1 columns then the label).
void export_bits_csv(const BinaryDataset& data, const std::string& path);

std::uint64_t bits_fingerprint(const BinaryDataset& data);

}  // namespace indsel
