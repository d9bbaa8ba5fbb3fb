// SPDX-License-Identifier: Apache-2.0
#pragma once

// Naive serial reference implementations. These recompute what the production
// kernels maintain incrementally (sliding sorted windows, popcount tables,
// the joint cache) with straightforward loops, and exist so tests can compare
// the two routes and the benchmark can report the gap. Not linked into the
// production library.

#include "indsel/harness.hpp"

namespace indsel::ref {

// Per-position window copies + std::sort; no sliding state.
std::vector<double> sweep_pvalues(std::span<const double> values, TestFamily family, int w);

// One score evaluation per (series, column), serial.
BinaryDataset binarize(const LabeledSeriesSet& series_set, const IndicatorGrid& grid);

// Per-instance counting loops instead of masked popcounts.
NBCModel fit(const BinaryDataset& data, double alpha = 1.0);

// From-scratch log-joint of one instance over a subset.
std::vector<double> log_joint(const NBCModel& model, const BinaryDataset& data,
                              const FeatureSubset& subset, std::size_t i);

double classification_error(const NBCModel& model, const BinaryDataset& data,
                            const FeatureSubset& subset);
double error_probability(const NBCModel& model, const BinaryDataset& data,
                         const FeatureSubset& subset);
double log_conditional_likelihood(const NBCModel& model, const BinaryDataset& data,
                                  const FeatureSubset& subset);
double measure_value(const NBCModel& model, const BinaryDataset& data,
                     const FeatureSubset& subset, Measure m);

// Contingency counting one instance at a time.
double mutual_information(const BitMatrix& bits, std::size_t column,
                          std::span<const ClassLabel> labels, int class_count);
double mutual_information_pair(const BitMatrix& bits, std::size_t a, std::size_t b);

// Direct evaluation of the mRMR difference criterion over all candidates;
// returns the argmax (ties to the lowest index).
std::size_t mrmr_step(const BinaryDataset& data, std::span<const std::size_t> selected);

struct Move {
  std::size_t feature = 0;
  double value = 0.0;
  bool found = false;
};

// Candidate scans with every candidate's measure recomputed from scratch.
Move best_add(const NBCModel& model, const BinaryDataset& data, const FeatureSubset& subset,
              Measure m);
Move best_remove(const NBCModel& model, const BinaryDataset& data,
                 const FeatureSubset& subset, Measure m);

}  // namespace indsel::ref
