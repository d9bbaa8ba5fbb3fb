// SPDX-License-Identifier: Apache-2.0
#include "indsel/nbc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "indsel/errors.hpp"

namespace indsel {

using nlohmann::json;

namespace {

// log-sum-exp of a K-vector.
double lse(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

int argmax_lowest(std::span<const double> x) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(x.size()); ++k)
    if (x[k] > x[best]) best = k;
  return best;
}

std::vector<std::vector<std::uint64_t>> class_masks(const BinaryDataset& data) {
  const std::size_t words = (data.rows() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(
      data.class_count, std::vector<std::uint64_t>(words, 0));
  for (std::size_t i = 0; i < data.rows(); ++i)
    masks[data.labels[i]][i >> 6] |= std::uint64_t{1} << (i & 63);
  return masks;
}

}  // namespace

NBCModel NBCModel::fit(const BinaryDataset& data, double alpha) {
  if (data.rows() == 0) throw ConfigError("fit: empty dataset");
  const int K = data.class_count;
  std::vector<int> class_counts(K, 0);
  for (ClassLabel l : data.labels) {
    if (l >= K) throw ConfigError("fit: label out of range");
    ++class_counts[l];
  }

  const auto masks = class_masks(data);
  std::vector<int> ones(data.cols() * K);
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < data.cols(); ++p) {
    const auto col = data.bits.column(p);
    for (int k = 0; k < K; ++k)
      ones[p * K + k] = static_cast<int>(popcount_and(col, masks[k]));
  }
  return from_counts(K, data.cols(), alpha, std::move(class_counts), ones,
                     data.grid.fingerprint());
}

NBCModel NBCModel::from_counts(int classes, std::size_t features, double alpha,
                               std::vector<int> class_counts, const std::vector<int>& ones,
                               std::uint64_t grid_fingerprint) {
  if (alpha < 0.0) throw ConfigError("fit: smoothing alpha must be >= 0");
  for (int k = 0; k < classes; ++k)
    if (class_counts[k] == 0)
      throw ConfigError("fit: class " + std::to_string(k) + " absent from data");
  NBCModel m;
  m.classes_ = classes;
  m.features_ = features;
  m.alpha_ = alpha;
  m.grid_fingerprint_ = grid_fingerprint;
  m.class_counts_ = std::move(class_counts);
  m.cond_p1_.resize(features * classes);
  for (std::size_t p = 0; p < features; ++p)
    for (int k = 0; k < classes; ++k)
      m.cond_p1_[p * classes + k] =
          (static_cast<double>(ones[p * classes + k]) + alpha) /
          (static_cast<double>(m.class_counts_[k]) + 2.0 * alpha);
  m.rebuild_logs();
  return m;
}

void NBCModel::rebuild_logs() {
  const int K = classes_;
  const double n = static_cast<double>(
      std::accumulate(class_counts_.begin(), class_counts_.end(), 0));
  log_prior_.resize(K);
  for (int k = 0; k < K; ++k)
    log_prior_[k] = std::log(static_cast<double>(class_counts_[k]) / n);

  cond_log_.resize(features_ * 2 * K);
  degenerate_.assign(features_, 0);
  for (std::size_t p = 0; p < features_; ++p) {
    for (int k = 0; k < K; ++k) {
      const double p1 = cond_p1_[p * K + k];
      if (p1 <= 0.0 || p1 >= 1.0) degenerate_[p] = 1;
      cond_log_[(p * 2 + 1) * K + k] = std::log(p1);
      cond_log_[(p * 2 + 0) * K + k] = std::log1p(-p1);
    }
  }
}

bool NBCModel::any_degenerate() const {
  return std::find(degenerate_.begin(), degenerate_.end(), 1) != degenerate_.end();
}

std::string NBCModel::to_json_string() const {
  json j;
  j["classes"] = classes_;
  j["features"] = features_;
  j["alpha"] = alpha_;
  j["grid_fingerprint"] = grid_fingerprint_;
  j["class_counts"] = class_counts_;
  j["cond_p1"] = cond_p1_;
  return j.dump();
}

NBCModel NBCModel::from_json_string(const std::string& text) {
  json j = json::parse(text);
  NBCModel m;
  m.classes_ = j.at("classes").get<int>();
  m.features_ = j.at("features").get<std::size_t>();
  m.alpha_ = j.at("alpha").get<double>();
  m.grid_fingerprint_ = j.at("grid_fingerprint").get<std::uint64_t>();
  m.class_counts_ = j.at("class_counts").get<std::vector<int>>();
  m.cond_p1_ = j.at("cond_p1").get<std::vector<double>>();
  if (m.cond_p1_.size() != m.features_ * m.classes_)
    throw IoError("model JSON: conditional table size mismatch");
  m.rebuild_logs();
  return m;
}

// --------------------------------------------------------------------------
// FeatureSubset
// --------------------------------------------------------------------------

FeatureSubset FeatureSubset::full(std::size_t universe) {
  FeatureSubset s(universe);
  s.ordered_.resize(universe);
  for (std::size_t p = 0; p < universe; ++p) s.ordered_[p] = p;
  std::fill(s.mask_.begin(), s.mask_.end(), 1);
  return s;
}

FeatureSubset FeatureSubset::of(std::size_t universe, std::span<const std::size_t> indices) {
  FeatureSubset s(universe);
  for (std::size_t p : indices) s.add(p);
  return s;
}

void FeatureSubset::add(std::size_t p) {
  if (p >= universe_) throw std::logic_error("subset add: feature index out of range");
  if (mask_[p]) throw std::logic_error("subset add: feature already present");
  mask_[p] = 1;
  ordered_.push_back(p);
}

void FeatureSubset::remove(std::size_t p) {
  if (p >= universe_) throw std::logic_error("subset remove: feature index out of range");
  if (!mask_[p]) throw std::logic_error("subset remove: feature not present");
  mask_[p] = 0;
  ordered_.erase(std::find(ordered_.begin(), ordered_.end(), p));
}

// --------------------------------------------------------------------------
// JointCache
// --------------------------------------------------------------------------

JointCache::JointCache(const NBCModel& model, const BinaryDataset& data, FeatureSubset subset)
    : model_(&model), data_(&data), subset_(std::move(subset)),
      rows_(data.rows()), classes_(model.classes()) {
  if (subset_.universe() != model.features())
    throw std::logic_error("cache: subset universe does not match model");
  if (data.cols() != model.features())
    throw std::logic_error("cache: dataset width does not match model");
  log_joint_.resize(rows_ * classes_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = 0; k < classes_; ++k) log_joint_[i * classes_ + k] = model.log_prior(k);
  for (std::size_t p : subset_.ordered()) apply(p, 1.0);
}

void JointCache::apply(std::size_t p, double sign) {
  const double* tab = model_->cond_table(p).data();
  const std::uint64_t* col = data_->bits.column(p).data();
  const int K = classes_;
  for (std::size_t i = 0; i < rows_; ++i) {
    const int b = static_cast<int>((col[i >> 6] >> (i & 63)) & 1u);
    const double* t = tab + b * K;
    double* r = log_joint_.data() + i * K;
    for (int k = 0; k < K; ++k) r[k] += sign * t[k];
  }
}

void JointCache::add_feature(std::size_t p) {
  subset_.add(p);  // contract check lives here
  apply(p, 1.0);
}

void JointCache::remove_feature(std::size_t p) {
  subset_.remove(p);
  apply(p, -1.0);
}

// --------------------------------------------------------------------------
// Measures
// --------------------------------------------------------------------------

double classification_error(const JointCache& cache, std::span<const ClassLabel> labels) {
  if (labels.size() != cache.rows()) throw std::logic_error("labels/cache size mismatch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < cache.rows(); ++i)
    if (argmax_lowest(cache.row(i)) != labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(cache.rows());
}

double error_probability(const JointCache& cache, std::span<const ClassLabel> labels) {
  if (labels.size() != cache.rows()) throw std::logic_error("labels/cache size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < cache.rows(); ++i) {
    const auto r = cache.row(i);
    acc += 1.0 - std::exp(r[labels[i]] - lse(r));
  }
  return acc / static_cast<double>(cache.rows());
}

double log_conditional_likelihood(const JointCache& cache, std::span<const ClassLabel> labels) {
  if (labels.size() != cache.rows()) throw std::logic_error("labels/cache size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < cache.rows(); ++i) {
    const auto r = cache.row(i);
    acc += r[labels[i]] - lse(r);
  }
  return acc;
}

std::vector<double> posterior(const NBCModel& model, const FeatureSubset& subset,
                              const BitMatrix& bits, std::size_t i) {
  const int K = model.classes();
  std::vector<double> lj(K);
  for (int k = 0; k < K; ++k) lj[k] = model.log_prior(k);
  for (std::size_t p : subset.ordered()) {
    const int b = bits.get(i, p) ? 1 : 0;
    for (int k = 0; k < K; ++k) lj[k] += model.log_cond(p, k, b);
  }
  const double z = lse(lj);
  std::vector<double> post(K);
  for (int k = 0; k < K; ++k) post[k] = std::exp(lj[k] - z);
  return post;
}

std::string explain_decision_json(const NBCModel& model, const FeatureSubset& subset,
                                  const BitMatrix& bits, std::size_t i) {
  const auto post = posterior(model, subset, bits, i);
  const int pred = argmax_lowest(post);
  const int K = model.classes();

  struct Item {
    std::size_t feature;
    int bit;
    double strength;  // max |log ratio| against the predicted class
    std::vector<double> log_ratio;
  };
  std::vector<Item> items;
  for (std::size_t p : subset.ordered()) {
    Item it;
    it.feature = p;
    it.bit = bits.get(i, p) ? 1 : 0;
    it.log_ratio.resize(K);
    it.strength = 0.0;
    for (int k = 0; k < K; ++k) {
      it.log_ratio[k] = model.log_cond(p, pred, it.bit) - model.log_cond(p, k, it.bit);
      it.strength = std::max(it.strength, std::fabs(it.log_ratio[k]));
    }
    items.push_back(std::move(it));
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.strength > b.strength; });

  json j;
  j["instance"] = i;
  j["predicted"] = pred;
  j["posterior"] = post;
  json feats = json::array();
  for (const Item& it : items)
    feats.push_back(json{{"feature", it.feature},
                         {"bit", it.bit},
                         {"log_ratio_vs_predicted", it.log_ratio}});
  j["features"] = std::move(feats);
  return j.dump();
}

}  // namespace indsel
