// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "indsel/selection.hpp"

namespace indsel {

struct GridAxes {
  std::vector<TestFamily> families;
  std::vector<int> windows;
  std::vector<double> thresholds;
  std::vector<bool> confirmations;
};

struct StrategySpec {
  std::string name;  // mi_filter | mrmr_filter | forward | backward |
                     // forward_backward | backward_forward
  Measure measure = Measure::kClassificationError;
};

// One experiment: dataset (generated or loaded), indicator grid, smoothing,
// and the strategy/measure rows to run. `scale` < 1 shrinks the instance
// counts and the window/threshold axes proportionally for smoke runs.
struct ExperimentConfig {
  DatasetSpec dataset;
  std::string train_path;  // optional: load series instead of generating
  std::string test_path;
  GridAxes grid;
  double alpha = 1.0;
  std::vector<StrategySpec> strategies;
  std::uint64_t seed = 42;
  std::string out_dir = "results";
  int threads = 0;  // 0 = leave OpenMP defaults (OMP_NUM_THREADS applies)
  double scale = 1.0;

  // Full-scale benchmark: 6000+6000 series, the default grid, and the ten
  // strategy/measure rows of the bundled comparison.
  static ExperimentConfig defaults();

  void validate() const;
  void apply_scale();  // folds `scale` into counts/axes and resets it to 1

  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

struct StrategyResult {
  std::string name;
  Measure measure = Measure::kClassificationError;
  std::size_t selected_size = 0;
  double validation_error = 1.0;
  double test_error = 1.0;
  double seconds = 0.0;
  std::size_t trace_length = 0;
  std::vector<std::size_t> subset;
};

struct ExperimentReport {
  std::vector<StrategyResult> rows;
  std::uint64_t train_fingerprint = 0;
  std::uint64_t test_fingerprint = 0;
  std::uint64_t grid_fingerprint = 0;
  std::size_t grid_size = 0;
  double total_seconds = 0.0;
  std::string config_echo;

  std::string to_csv() const;
  std::string to_json_string() const;
};

// Seeded stratified half split: within each class, a Fisher-Yates shuffle,
// first half to A (the search half), rest to B (the validation half). Sizes
// differ by at most one instance per class.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_half_split(
    std::span<const ClassLabel> labels, int class_count, std::uint64_t seed);

// The full protocol: generate/load train+test series, binarize, split the
// training set, fit on half A, search on half A, pick the subset on half B,
// score on the test set. Writes report.csv/report.json, model.json,
// train.bits/test.bits, and per-row traces and subsets under out_dir.
ExperimentReport run_protocol(const ExperimentConfig& config);

}  // namespace indsel
