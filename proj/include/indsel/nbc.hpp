// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indsel/indicators.hpp"

namespace indsel {

// Naive Bayes over binary features, log-space, Laplace-smoothed.
// Conditional tables are laid out per feature as [b][k] so a cache update
// reads one contiguous K-vector per instance.
class NBCModel {
 public:
  NBCModel() = default;

  // P(B^p=1|Y=k) = (count(1,k) + alpha) / (count(k) + 2 alpha). Throws when a
  // class has no instances (priors undefined). O(N P) via column popcounts.
  static NBCModel fit(const BinaryDataset& data, double alpha = 1.0);

  // Same model from precomputed class-conditional ones-counts (P x K,
  // feature-major). Counting and probability arithmetic stay separable so an
  // independent counting route can build the identical model.
  static NBCModel from_counts(int classes, std::size_t features, double alpha,
                              std::vector<int> class_counts, const std::vector<int>& ones,
                              std::uint64_t grid_fingerprint);

  int classes() const { return classes_; }
  std::size_t features() const { return features_; }
  double alpha() const { return alpha_; }
  double log_prior(int k) const { return log_prior_[k]; }
  int class_count(int k) const { return class_counts_[k]; }
  double cond_p1(std::size_t p, int k) const { return cond_p1_[p * classes_ + k]; }

  double log_cond(std::size_t p, int k, int b) const {
    return cond_log_[(p * 2 + b) * classes_ + k];
  }
  // [b * K + k] for feature p; contiguous 2K doubles.
  std::span<const double> cond_table(std::size_t p) const {
    return {cond_log_.data() + p * 2 * classes_, static_cast<std::size_t>(2 * classes_)};
  }

  // True when some conditional is exactly 0 or 1 (possible only with alpha=0).
  bool degenerate(std::size_t p) const { return degenerate_[p] != 0; }
  bool any_degenerate() const;

  std::uint64_t grid_fingerprint() const { return grid_fingerprint_; }

  std::string to_json_string() const;
  static NBCModel from_json_string(const std::string& text);

 private:
  void rebuild_logs();

  int classes_ = 0;
  std::size_t features_ = 0;
  double alpha_ = 1.0;
  std::uint64_t grid_fingerprint_ = 0;
  std::vector<int> class_counts_;
  std::vector<double> log_prior_;
  std::vector<double> cond_p1_;   // P x K
  std::vector<double> cond_log_;  // P x 2 x K, [b][k] per feature
  std::vector<std::uint8_t> degenerate_;
};

// Ordered feature subset with O(1) membership.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  explicit FeatureSubset(std::size_t universe) : universe_(universe), mask_(universe, 0) {}

  static FeatureSubset full(std::size_t universe);
  static FeatureSubset of(std::size_t universe, std::span<const std::size_t> indices);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return ordered_.size(); }
  bool contains(std::size_t p) const { return mask_[p] != 0; }
  const std::vector<std::size_t>& ordered() const { return ordered_; }

  void add(std::size_t p);     // std::logic_error if already present
  void remove(std::size_t p);  // std::logic_error if absent

 private:
  std::size_t universe_ = 0;
  std::vector<std::size_t> ordered_;
  std::vector<std::uint8_t> mask_;
};

// Per-instance, per-class running log-joint
//   log P(Y=k) + sum_{p in S} log P(B^p = b_i^p | Y=k),
// updated in O(N K) when a feature enters or leaves the subset. This is what
// makes greedy wrapper searches O(N P^2) overall.
class JointCache {
 public:
  JointCache(const NBCModel& model, const BinaryDataset& data, FeatureSubset subset);

  void add_feature(std::size_t p);
  void remove_feature(std::size_t p);

  std::span<const double> row(std::size_t i) const {
    return {log_joint_.data() + i * classes_, static_cast<std::size_t>(classes_)};
  }
  std::size_t rows() const { return rows_; }
  int classes() const { return classes_; }
  const FeatureSubset& subset() const { return subset_; }
  const NBCModel& model() const { return *model_; }
  const BinaryDataset& data() const { return *data_; }

 private:
  void apply(std::size_t p, double sign);

  const NBCModel* model_ = nullptr;
  const BinaryDataset* data_ = nullptr;
  FeatureSubset subset_;
  std::size_t rows_ = 0;
  int classes_ = 0;
  std::vector<double> log_joint_;  // N x K
};

// Fraction of instances whose argmax log-joint (ties to the lowest class
// index) differs from the label.
double classification_error(const JointCache& cache, std::span<const ClassLabel> labels);

// Mean over instances of 1 - posterior(true class): the model's own estimate
// of its error probability.
double error_probability(const JointCache& cache, std::span<const ClassLabel> labels);

// Sum of log-posteriors of the true classes (always <= 0).
double log_conditional_likelihood(const JointCache& cache, std::span<const ClassLabel> labels);

// Posterior over classes for one instance, restricted to `subset`; sums to 1.
std::vector<double> posterior(const NBCModel& model, const FeatureSubset& subset,
                              const BitMatrix& bits, std::size_t i);

// Grey-box explanation of one decision: per-feature conditional log-ratios
// against the predicted class, strongest first.
std::string explain_decision_json(const NBCModel& model, const FeatureSubset& subset,
                                  const BitMatrix& bits, std::size_t i);

}  // namespace indsel
