// SPDX-License-Identifier: Apache-2.0
#include "indsel/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace indsel::ref {

std::vector<double> sweep_pvalues(std::span<const double> values, TestFamily family, int w) {
  std::vector<double> out;
  const int len = static_cast<int>(values.size());
  if (len < w) return out;
  const int half = w / 2;
  for (int j = 0; j + w <= len; ++j) {
    std::vector<double> left(values.begin() + j, values.begin() + j + half);
    std::vector<double> right(values.begin() + j + half, values.begin() + j + w);
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    double p = 1.0;
    switch (family) {
      case TestFamily::kMannWhitneyU: p = detail::u_pvalue_sorted(left, right); break;
      case TestFamily::kKolmogorovSmirnov: p = detail::ks_pvalue_sorted(left, right); break;
      case TestFamily::kFVariance: p = detail::f_pvalue(left, right); break;
    }
    out.push_back(p);
  }
  return out;
}

BinaryDataset binarize(const LabeledSeriesSet& series_set, const IndicatorGrid& grid) {
  BinaryDataset data;
  data.grid = grid;
  data.bits = BitMatrix(series_set.size(), grid.size());
  data.labels.resize(series_set.size());
  for (std::size_t i = 0; i < series_set.size(); ++i) {
    const TimeSeries& s = series_set.series[i];
    data.labels[i] = static_cast<ClassLabel>(s.label);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const ScoreSpec& spec = grid[j].score;
      const auto sweep = ref::sweep_pvalues(s.values, spec.family, spec.window_size);
      const double p = collapse_sweep(sweep, spec.window_size, spec.confirmation);
      if (p <= grid[j].threshold) data.bits.set(i, j, true);
    }
  }
  return data;
}

NBCModel fit(const BinaryDataset& data, double alpha) {
  const int K = data.class_count;
  std::vector<int> class_counts(K, 0);
  for (ClassLabel l : data.labels) ++class_counts[l];
  std::vector<int> ones(data.cols() * K, 0);
  for (std::size_t i = 0; i < data.rows(); ++i)
    for (std::size_t p = 0; p < data.cols(); ++p)
      if (data.bits.get(i, p)) ++ones[p * K + data.labels[i]];
  return NBCModel::from_counts(K, data.cols(), alpha, std::move(class_counts), ones,
                               data.grid.fingerprint());
}

std::vector<double> log_joint(const NBCModel& model, const BinaryDataset& data,
                              const FeatureSubset& subset, std::size_t i) {
  std::vector<double> lj(model.classes());
  for (int k = 0; k < model.classes(); ++k) lj[k] = model.log_prior(k);
  for (std::size_t p : subset.ordered()) {
    const int b = data.bits.get(i, p) ? 1 : 0;
    for (int k = 0; k < model.classes(); ++k) lj[k] += model.log_cond(p, k, b);
  }
  return lj;
}

namespace {

double lse(const std::vector<double>& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

int argmax_lowest(const std::vector<double>& x) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(x.size()); ++k)
    if (x[k] > x[best]) best = k;
  return best;
}

}  // namespace

double classification_error(const NBCModel& model, const BinaryDataset& data,
                            const FeatureSubset& subset) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (argmax_lowest(log_joint(model, data, subset, i)) != data.labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.rows());
}

double error_probability(const NBCModel& model, const BinaryDataset& data,
                         const FeatureSubset& subset) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto lj = log_joint(model, data, subset, i);
    acc += 1.0 - std::exp(lj[data.labels[i]] - lse(lj));
  }
  return acc / static_cast<double>(data.rows());
}

double log_conditional_likelihood(const NBCModel& model, const BinaryDataset& data,
                                  const FeatureSubset& subset) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto lj = log_joint(model, data, subset, i);
    acc += lj[data.labels[i]] - lse(lj);
  }
  return acc;
}

double measure_value(const NBCModel& model, const BinaryDataset& data,
                     const FeatureSubset& subset, Measure m) {
  switch (m) {
    case Measure::kClassificationError: return classification_error(model, data, subset);
    case Measure::kErrorProbability: return error_probability(model, data, subset);
    case Measure::kLogConditionalLikelihood:
      return -log_conditional_likelihood(model, data, subset);
  }
  return 0.0;
}

double mutual_information(const BitMatrix& bits, std::size_t column,
                          std::span<const ClassLabel> labels, int class_count) {
  const std::size_t n = bits.rows();
  std::vector<std::vector<double>> joint(2, std::vector<double>(class_count, 0.0));
  for (std::size_t i = 0; i < n; ++i) joint[bits.get(i, column) ? 1 : 0][labels[i]] += 1.0;
  std::vector<double> pb(2, 0.0), pk(class_count, 0.0);
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < class_count; ++k) {
      pb[b] += joint[b][k];
      pk[k] += joint[b][k];
    }
  double mi = 0.0;
  const double dn = static_cast<double>(n);
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < class_count; ++k) {
      if (joint[b][k] <= 0.0) continue;
      mi += joint[b][k] / dn * std::log(joint[b][k] * dn / (pb[b] * pk[k]));
    }
  return mi < 0.0 ? 0.0 : mi;
}

double mutual_information_pair(const BitMatrix& bits, std::size_t a, std::size_t b) {
  const std::size_t n = bits.rows();
  double joint[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (std::size_t i = 0; i < n; ++i)
    joint[bits.get(i, a) ? 1 : 0][bits.get(i, b) ? 1 : 0] += 1.0;
  const double pa[2] = {joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]};
  const double pb[2] = {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]};
  double mi = 0.0;
  const double dn = static_cast<double>(n);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (joint[x][y] <= 0.0) continue;
      mi += joint[x][y] / dn * std::log(joint[x][y] * dn / (pa[x] * pb[y]));
    }
  return mi < 0.0 ? 0.0 : mi;
}

std::size_t mrmr_step(const BinaryDataset& data, std::span<const std::size_t> selected) {
  std::vector<std::uint8_t> taken(data.cols(), 0);
  for (std::size_t s : selected) taken[s] = 1;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_j = data.cols();
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (taken[j]) continue;
    double score = ref::mutual_information(data.bits, j, data.labels, data.class_count);
    if (!selected.empty()) {
      double red = 0.0;
      for (std::size_t s : selected) red += ref::mutual_information_pair(data.bits, j, s);
      score -= red / static_cast<double>(selected.size());
    }
    if (score > best) {
      best = score;
      best_j = j;
    }
  }
  if (best_j == data.cols()) throw std::logic_error("mrmr_step: no candidates");
  return best_j;
}

namespace {

Move best_move(const NBCModel& model, const BinaryDataset& data, const FeatureSubset& subset,
               Measure m, bool adding) {
  Move best;
  for (std::size_t p = 0; p < model.features(); ++p) {
    if (subset.contains(p) == adding) continue;
    FeatureSubset trial = subset;
    if (adding) trial.add(p);
    else trial.remove(p);
    const double v = measure_value(model, data, trial, m);
    if (!best.found || v < best.value) {
      best.found = true;
      best.value = v;
      best.feature = p;
    }
  }
  return best;
}

}  // namespace

Move best_add(const NBCModel& model, const BinaryDataset& data, const FeatureSubset& subset,
              Measure m) {
  return best_move(model, data, subset, m, true);
}

Move best_remove(const NBCModel& model, const BinaryDataset& data,
                 const FeatureSubset& subset, Measure m) {
  return best_move(model, data, subset, m, false);
}

}  // namespace indsel::ref
