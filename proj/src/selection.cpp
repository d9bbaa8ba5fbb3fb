// SPDX-License-Identifier: Apache-2.0
#include "indsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "indsel/errors.hpp"

namespace indsel {

using nlohmann::json;

const char* to_string(Measure m) {
  switch (m) {
    case Measure::kClassificationError: return "error";
    case Measure::kErrorProbability: return "probability";
    case Measure::kLogConditionalLikelihood: return "log_likelihood";
  }
  return "?";
}

Measure measure_from_string(const std::string& name) {
  if (name == "error") return Measure::kClassificationError;
  if (name == "probability") return Measure::kErrorProbability;
  if (name == "log_likelihood") return Measure::kLogConditionalLikelihood;
  throw ConfigError("unknown measure: " + name);
}

double measure_value(const JointCache& cache, std::span<const ClassLabel> labels, Measure m) {
  switch (m) {
    case Measure::kClassificationError: return classification_error(cache, labels);
    case Measure::kErrorProbability: return error_probability(cache, labels);
    case Measure::kLogConditionalLikelihood:
      return -log_conditional_likelihood(cache, labels);
  }
  return 0.0;
}

// --------------------------------------------------------------------------
// Mutual information and filters
// --------------------------------------------------------------------------

namespace {

double xlogx_ratio(double joint, double margin_a, double margin_b, double n) {
  // contribution p(a,b) * log(p(a,b) / (p(a) p(b))) from raw counts
  if (joint <= 0.0) return 0.0;
  return joint / n * std::log(joint * n / (margin_a * margin_b));
}

std::vector<std::vector<std::uint64_t>> label_masks(std::span<const ClassLabel> labels, int K,
                                                    std::size_t words) {
  std::vector<std::vector<std::uint64_t>> masks(K, std::vector<std::uint64_t>(words, 0));
  for (std::size_t i = 0; i < labels.size(); ++i)
    masks[labels[i]][i >> 6] |= std::uint64_t{1} << (i & 63);
  return masks;
}

double mi_feature_label(const BitMatrix& bits, std::size_t column,
                        const std::vector<std::vector<std::uint64_t>>& masks,
                        std::span<const std::size_t> class_counts) {
  const double n = static_cast<double>(bits.rows());
  const auto col = bits.column(column);
  const double n1 = static_cast<double>(popcount_words(col));
  const double n0 = n - n1;
  double mi = 0.0;
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const double nk = static_cast<double>(class_counts[k]);
    const double c1 = static_cast<double>(popcount_and(col, masks[k]));
    const double c0 = nk - c1;
    mi += xlogx_ratio(c1, n1, nk, n);
    mi += xlogx_ratio(c0, n0, nk, n);
  }
  return mi < 0.0 ? 0.0 : mi;  // clamp tiny negative rounding
}

double mi_feature_feature(const BitMatrix& bits, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(bits.rows());
  const auto ca = bits.column(a);
  const auto cb = bits.column(b);
  const double a1 = static_cast<double>(popcount_words(ca));
  const double b1 = static_cast<double>(popcount_words(cb));
  const double n11 = static_cast<double>(popcount_and(ca, cb));
  const double n10 = a1 - n11;
  const double n01 = b1 - n11;
  const double n00 = n - a1 - n01;
  double mi = 0.0;
  mi += xlogx_ratio(n11, a1, b1, n);
  mi += xlogx_ratio(n10, a1, n - b1, n);
  mi += xlogx_ratio(n01, n - a1, b1, n);
  mi += xlogx_ratio(n00, n - a1, n - b1, n);
  return mi < 0.0 ? 0.0 : mi;
}

std::vector<std::size_t> count_classes(std::span<const ClassLabel> labels, int K) {
  std::vector<std::size_t> counts(K, 0);
  for (ClassLabel l : labels) ++counts[l];
  return counts;
}

}  // namespace

double mutual_information(const BitMatrix& bits, std::size_t column,
                          std::span<const ClassLabel> labels, int class_count) {
  if (labels.size() != bits.rows()) throw std::logic_error("labels/bits size mismatch");
  if (labels.empty()) throw std::logic_error("mutual_information: empty column");
  const auto masks = label_masks(labels, class_count, bits.words_per_col());
  const auto counts = count_classes(labels, class_count);
  return mi_feature_label(bits, column, masks, counts);
}

Ranking mi_rank(const BinaryDataset& data) {
  const std::size_t p = data.cols();
  const auto masks = label_masks(data.labels, data.class_count, data.bits.words_per_col());
  const auto counts = count_classes(data.labels, data.class_count);
  std::vector<double> mi(p);
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < p; ++j)
    mi[j] = mi_feature_label(data.bits, j, masks, counts);

  Ranking r;
  r.method = "mi_filter";
  r.order.resize(p);
  for (std::size_t j = 0; j < p; ++j) r.order[j] = j;
  std::sort(r.order.begin(), r.order.end(), [&mi](std::size_t a, std::size_t b) {
    if (mi[a] != mi[b]) return mi[a] > mi[b];
    return a < b;
  });
  r.criterion.resize(p);
  for (std::size_t j = 0; j < p; ++j) r.criterion[j] = mi[r.order[j]];
  return r;
}

Ranking mrmr_rank(const BinaryDataset& data, std::size_t limit) {
  const std::size_t p = data.cols();
  if (limit > p) throw ConfigError("mrmr_rank: limit exceeds feature count");
  const auto masks = label_masks(data.labels, data.class_count, data.bits.words_per_col());
  const auto counts = count_classes(data.labels, data.class_count);

  std::vector<double> relevance(p);
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < p; ++j)
    relevance[j] = mi_feature_label(data.bits, j, masks, counts);

  Ranking r;
  r.method = "mrmr_filter";
  std::vector<std::uint8_t> taken(p, 0);
  std::vector<double> redundancy(p, 0.0);  // sum of I(B^j; B^s) over selected s
  for (std::size_t step = 0; step < limit; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_j = p;
    for (std::size_t j = 0; j < p; ++j) {
      if (taken[j]) continue;
      const double score =
          step == 0 ? relevance[j]
                    : relevance[j] - redundancy[j] / static_cast<double>(step);
      if (score > best) {
        best = score;
        best_j = j;
      }
    }
    taken[best_j] = 1;
    r.order.push_back(best_j);
    r.criterion.push_back(best);
    if (step + 1 < limit) {
#pragma omp parallel for schedule(static)
      for (std::size_t j = 0; j < p; ++j)
        if (!taken[j]) redundancy[j] += mi_feature_feature(data.bits, j, best_j);
    }
  }
  return r;
}

// --------------------------------------------------------------------------
// Wrapper searches
// --------------------------------------------------------------------------

namespace {

// Measure of the cache with feature p hypothetically added (sign=+1) or
// removed (sign=-1); reads the frozen cache, no mutation.
double candidate_measure(const JointCache& cache, std::span<const ClassLabel> labels,
                         Measure m, std::size_t p, double sign) {
  const NBCModel& model = cache.model();
  const int K = cache.classes();
  const double* tab = model.cond_table(p).data();
  const std::uint64_t* col = cache.data().bits.column(p).data();
  const std::size_t n = cache.rows();
  double lj[8];  // K <= 4 in this artifact; oversized for safety

  switch (m) {
    case Measure::kClassificationError: {
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* r = cache.row(i).data();
        const double* t = tab + (((col[i >> 6] >> (i & 63)) & 1u) ? K : 0);
        int best = 0;
        lj[0] = r[0] + sign * t[0];
        for (int k = 1; k < K; ++k) {
          lj[k] = r[k] + sign * t[k];
          if (lj[k] > lj[best]) best = k;
        }
        if (best != static_cast<int>(labels[i])) ++wrong;
      }
      return static_cast<double>(wrong) / static_cast<double>(n);
    }
    case Measure::kErrorProbability: {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* r = cache.row(i).data();
        const double* t = tab + (((col[i >> 6] >> (i & 63)) & 1u) ? K : 0);
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
          lj[k] = r[k] + sign * t[k];
          mx = std::max(mx, lj[k]);
        }
        double z = 0.0;
        for (int k = 0; k < K; ++k) z += std::exp(lj[k] - mx);
        acc += 1.0 - std::exp(lj[labels[i]] - mx) / z;
      }
      return acc / static_cast<double>(n);
    }
    case Measure::kLogConditionalLikelihood: {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* r = cache.row(i).data();
        const double* t = tab + (((col[i >> 6] >> (i & 63)) & 1u) ? K : 0);
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
          lj[k] = r[k] + sign * t[k];
          mx = std::max(mx, lj[k]);
        }
        double z = 0.0;
        for (int k = 0; k < K; ++k) z += std::exp(lj[k] - mx);
        acc += lj[labels[i]] - mx - std::log(z);
      }
      return -acc;
    }
  }
  return 0.0;
}

struct BestMove {
  double value = std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  bool found = false;
};

// Scans candidates against the frozen cache; parallel over candidates, then a
// serial (value, index) argmin so the result does not depend on thread count.
BestMove scan_moves(const JointCache& cache, std::span<const ClassLabel> labels, Measure m,
                    MoveAction action) {
  if (cache.classes() > 8)
    throw std::logic_error("scan_moves: class count exceeds the fixed candidate buffer");
  const std::size_t p_total = cache.model().features();
  std::vector<std::size_t> cands;
  cands.reserve(p_total);
  if (action == MoveAction::kAdd) {
    for (std::size_t p = 0; p < p_total; ++p)
      if (!cache.subset().contains(p)) cands.push_back(p);
  } else {
    for (std::size_t p = 0; p < p_total; ++p)
      if (cache.subset().contains(p)) cands.push_back(p);
  }
  BestMove best;
  if (cands.empty()) return best;

  std::vector<double> values(cands.size());
  const double sign = action == MoveAction::kAdd ? 1.0 : -1.0;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t c = 0; c < cands.size(); ++c)
    values[c] = candidate_measure(cache, labels, m, cands[c], sign);

  best.found = true;
  best.feature = cands[0];
  best.value = values[0];
  for (std::size_t c = 1; c < cands.size(); ++c)
    if (values[c] < best.value) {  // strict: ties keep the lowest index
      best.value = values[c];
      best.feature = cands[c];
    }
  return best;
}

}  // namespace

SelectionTrace forward_search(const BinaryDataset& data, const NBCModel& model, Measure m,
                              std::size_t cap) {
  if (cap > model.features()) throw ConfigError("forward_search: cap exceeds feature count");
  SelectionTrace trace;
  trace.method = "forward";
  trace.measure = m;
  trace.universe = model.features();
  JointCache cache(model, data, FeatureSubset(model.features()));
  for (std::size_t step = 0; step < cap; ++step) {
    const BestMove best = scan_moves(cache, data.labels, m, MoveAction::kAdd);
    cache.add_feature(best.feature);
    trace.steps.push_back({MoveAction::kAdd, best.feature, best.value, cache.subset().size()});
  }
  return trace;
}

SelectionTrace backward_search(const BinaryDataset& data, const NBCModel& model, Measure m) {
  SelectionTrace trace;
  trace.method = "backward";
  trace.measure = m;
  trace.universe = model.features();
  FeatureSubset full = FeatureSubset::full(model.features());
  trace.initial = full.ordered();
  JointCache cache(model, data, std::move(full));
  while (cache.subset().size() > 0) {
    const BestMove best = scan_moves(cache, data.labels, m, MoveAction::kRemove);
    cache.remove_feature(best.feature);
    trace.steps.push_back(
        {MoveAction::kRemove, best.feature, best.value, cache.subset().size()});
  }
  return trace;
}

SelectionTrace floating_search(const BinaryDataset& data, const NBCModel& model, Measure m,
                               FloatStart start) {
  constexpr double kImproveEps = 1e-12;
  SelectionTrace trace;
  trace.method = start == FloatStart::kForward ? "forward_backward" : "backward_forward";
  trace.measure = m;
  trace.universe = model.features();

  FeatureSubset initial = start == FloatStart::kForward
                              ? FeatureSubset(model.features())
                              : FeatureSubset::full(model.features());
  trace.initial = initial.ordered();
  JointCache cache(model, data, std::move(initial));
  double current = measure_value(cache, data.labels, m);

  const std::size_t budget = 10 * model.features();
  std::size_t moves = 0;
  MoveAction dir = start == FloatStart::kForward ? MoveAction::kAdd : MoveAction::kRemove;
  int idle_phases = 0;
  while (idle_phases < 2) {
    bool moved = false;
    while (true) {
      const BestMove best = scan_moves(cache, data.labels, m, dir);
      if (!best.found || !(best.value < current - kImproveEps)) break;
      if (dir == MoveAction::kAdd) cache.add_feature(best.feature);
      else cache.remove_feature(best.feature);
      trace.steps.push_back({dir, best.feature, best.value, cache.subset().size()});
      current = best.value;
      moved = true;
      if (++moves > budget)
        throw std::runtime_error("floating_search: move budget exhausted (cycling?)");
    }
    idle_phases = moved ? 0 : idle_phases + 1;
    dir = dir == MoveAction::kAdd ? MoveAction::kRemove : MoveAction::kAdd;
  }
  return trace;
}

// --------------------------------------------------------------------------
// Validation-based subset choice
// --------------------------------------------------------------------------

namespace {

struct ChoiceScan {
  double best_error = std::numeric_limits<double>::infinity();
  std::size_t best_size = std::numeric_limits<std::size_t>::max();
  std::size_t best_pos = 0;

  void offer(double error, std::size_t size, std::size_t pos) {
    if (error < best_error || (error == best_error && size < best_size)) {
      best_error = error;
      best_size = size;
      best_pos = pos;
    }
  }
};

}  // namespace

SubsetChoice select_best_subset(const SelectionTrace& trace, const NBCModel& model,
                                const BinaryDataset& validation) {
  JointCache cache(model, validation,
                   FeatureSubset::of(model.features(), trace.initial));
  ChoiceScan scan;
  scan.offer(classification_error(cache, validation.labels), cache.subset().size(), 0);
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const TraceStep& step = trace.steps[s];
    if (step.action == MoveAction::kAdd) cache.add_feature(step.feature);
    else cache.remove_feature(step.feature);
    scan.offer(classification_error(cache, validation.labels), cache.subset().size(), s + 1);
  }

  SubsetChoice choice;
  choice.position = scan.best_pos;
  choice.validation_error = scan.best_error;
  FeatureSubset subset = FeatureSubset::of(model.features(), trace.initial);
  for (std::size_t s = 0; s < scan.best_pos; ++s) {
    const TraceStep& step = trace.steps[s];
    if (step.action == MoveAction::kAdd) subset.add(step.feature);
    else subset.remove(step.feature);
  }
  choice.subset = std::move(subset);
  return choice;
}

SubsetChoice select_best_subset(const Ranking& ranking, const NBCModel& model,
                                const BinaryDataset& validation) {
  JointCache cache(model, validation, FeatureSubset(model.features()));
  ChoiceScan scan;
  scan.offer(classification_error(cache, validation.labels), 0, 0);
  for (std::size_t s = 0; s < ranking.order.size(); ++s) {
    cache.add_feature(ranking.order[s]);
    scan.offer(classification_error(cache, validation.labels), s + 1, s + 1);
  }

  SubsetChoice choice;
  choice.position = scan.best_pos;
  choice.validation_error = scan.best_error;
  FeatureSubset subset(model.features());
  for (std::size_t s = 0; s < scan.best_pos; ++s) subset.add(ranking.order[s]);
  choice.subset = std::move(subset);
  return choice;
}

// --------------------------------------------------------------------------
// Trace serialization
// --------------------------------------------------------------------------

void write_trace_jsonl(const SelectionTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << json{{"action", "init"},
             {"method", trace.method},
             {"measure", to_string(trace.measure)},
             {"universe", trace.universe},
             {"initial", trace.initial}}
            .dump()
     << '\n';
  for (const TraceStep& s : trace.steps)
    os << json{{"action", s.action == MoveAction::kAdd ? "add" : "remove"},
               {"feature", s.feature},
               {"measure", s.measure},
               {"size", s.subset_size}}
              .dump()
       << '\n';
}

SelectionTrace read_trace_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  SelectionTrace trace;
  std::string line;
  bool init_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    const std::string action = j.at("action").get<std::string>();
    if (action == "init") {
      trace.method = j.at("method").get<std::string>();
      trace.measure = measure_from_string(j.at("measure").get<std::string>());
      trace.universe = j.at("universe").get<std::size_t>();
      trace.initial = j.at("initial").get<std::vector<std::size_t>>();
      init_seen = true;
      continue;
    }
    if (!init_seen) throw IoError(path + ": missing init line");
    TraceStep s;
    s.action = action == "add" ? MoveAction::kAdd : MoveAction::kRemove;
    s.feature = j.at("feature").get<std::size_t>();
    s.measure = j.at("measure").get<double>();
    s.subset_size = j.at("size").get<std::size_t>();
    trace.steps.push_back(s);
  }
  return trace;
}

void write_ranking_jsonl(const Ranking& ranking, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << json{{"action", "init"}, {"method", ranking.method}, {"ranked", ranking.order.size()}}
            .dump()
     << '\n';
  for (std::size_t s = 0; s < ranking.order.size(); ++s)
    os << json{{"action", "rank"},
               {"feature", ranking.order[s]},
               {"criterion", ranking.criterion[s]},
               {"size", s + 1}}
              .dump()
       << '\n';
}

}  // namespace indsel
