// SPDX-License-Identifier: Apache-2.0
#include "indsel/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "indsel/errors.hpp"

namespace indsel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<int> subsample_axis(const std::vector<int>& xs, std::size_t keep) {
  keep = std::clamp<std::size_t>(keep, 1, xs.size());
  std::vector<int> out;
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t idx =
        keep == 1 ? 0 : i * (xs.size() - 1) / (keep - 1);
    out.push_back(xs[idx]);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> subsample_axis(const std::vector<double>& xs, std::size_t keep) {
  keep = std::clamp<std::size_t>(keep, 2, xs.size());
  std::vector<double> out;
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t idx = i * (xs.size() - 1) / (keep - 1);
    out.push_back(xs[idx]);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.dataset = DatasetSpec{};  // 3000 + 3x1000, lengths 100..200
  c.grid.families = {TestFamily::kMannWhitneyU, TestFamily::kKolmogorovSmirnov,
                     TestFamily::kFVariance};
  c.grid.windows = {20, 30, 40, 50, 60, 70};
  c.grid.thresholds = {0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  c.grid.confirmations = {false, true};
  c.alpha = 1.0;
  c.strategies = {
      {"mi_filter", Measure::kClassificationError},
      {"mrmr_filter", Measure::kClassificationError},
      {"forward", Measure::kClassificationError},
      {"forward", Measure::kErrorProbability},
      {"backward", Measure::kClassificationError},
      {"backward", Measure::kErrorProbability},
      {"forward_backward", Measure::kClassificationError},
      {"forward_backward", Measure::kErrorProbability},
      {"backward_forward", Measure::kClassificationError},
      {"backward_forward", Measure::kErrorProbability},
  };
  return c;
}

void ExperimentConfig::validate() const {
  if (strategies.empty()) throw ConfigError("config: no strategies enabled");
  for (const StrategySpec& s : strategies) {
    if (s.name != "mi_filter" && s.name != "mrmr_filter" && s.name != "forward" &&
        s.name != "backward" && s.name != "forward_backward" && s.name != "backward_forward")
      throw ConfigError("config: unknown strategy " + s.name);
  }
  if (alpha < 0.0) throw ConfigError("config: alpha must be >= 0");
  if (scale <= 0.0 || scale > 1.0) throw ConfigError("config: scale must lie in (0, 1]");
  if (!train_path.empty() && !fs::exists(train_path) &&
      !fs::exists(train_path + ".meta.csv"))
    throw ConfigError("config: train_path does not exist: " + train_path);
  if (!test_path.empty() && !fs::exists(test_path) && !fs::exists(test_path + ".meta.csv"))
    throw ConfigError("config: test_path does not exist: " + test_path);
  dataset.validate();
}

void ExperimentConfig::apply_scale() {
  if (scale == 1.0) return;
  dataset.n_normal = std::max<int>(8, static_cast<int>(std::lround(dataset.n_normal * scale)));
  dataset.n_per_anomaly_class =
      std::max<int>(4, static_cast<int>(std::lround(dataset.n_per_anomaly_class * scale)));
  grid.windows = subsample_axis(
      grid.windows, static_cast<std::size_t>(std::lround(grid.windows.size() * scale)));
  grid.thresholds = subsample_axis(
      grid.thresholds, static_cast<std::size_t>(std::lround(grid.thresholds.size() * scale)));
  scale = 1.0;
}

namespace {

json axes_to_json(const GridAxes& g) {
  json fam = json::array();
  for (TestFamily f : g.families) fam.push_back(to_string(f));
  return json{{"families", fam},
              {"windows", g.windows},
              {"thresholds", g.thresholds},
              {"confirmations", g.confirmations}};
}

GridAxes axes_from_json(const json& j) {
  GridAxes g;
  for (const json& f : j.at("families"))
    g.families.push_back(family_from_string(f.get<std::string>()));
  g.windows = j.at("windows").get<std::vector<int>>();
  g.thresholds = j.at("thresholds").get<std::vector<double>>();
  g.confirmations = j.at("confirmations").get<std::vector<bool>>();
  return g;
}

json dataset_to_json(const DatasetSpec& s) {
  return json{{"n_normal", s.n_normal},
              {"n_per_anomaly_class", s.n_per_anomaly_class},
              {"length_range", {s.min_length, s.max_length}},
              {"mean_shift_range", {s.mean_shift_min, s.mean_shift_max}},
              {"sigma_shift_range", {s.sigma_shift_min, s.sigma_shift_max}},
              {"trend_amplitude_range", {s.trend_amplitude_min, s.trend_amplitude_max}}};
}

DatasetSpec dataset_from_json(const json& j, DatasetSpec base) {
  if (j.contains("n_normal")) base.n_normal = j["n_normal"].get<int>();
  if (j.contains("n_per_anomaly_class"))
    base.n_per_anomaly_class = j["n_per_anomaly_class"].get<int>();
  if (j.contains("length_range")) {
    base.min_length = j["length_range"][0].get<int>();
    base.max_length = j["length_range"][1].get<int>();
  }
  if (j.contains("mean_shift_range")) {
    base.mean_shift_min = j["mean_shift_range"][0].get<double>();
    base.mean_shift_max = j["mean_shift_range"][1].get<double>();
  }
  if (j.contains("sigma_shift_range")) {
    base.sigma_shift_min = j["sigma_shift_range"][0].get<double>();
    base.sigma_shift_max = j["sigma_shift_range"][1].get<double>();
  }
  if (j.contains("trend_amplitude_range")) {
    base.trend_amplitude_min = j["trend_amplitude_range"][0].get<double>();
    base.trend_amplitude_max = j["trend_amplitude_range"][1].get<double>();
  }
  return base;
}

}  // namespace

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["dataset"] = dataset_to_json(dataset);
  if (!train_path.empty()) j["train_path"] = train_path;
  if (!test_path.empty()) j["test_path"] = test_path;
  j["grid"] = axes_to_json(grid);
  j["alpha"] = alpha;
  json strat = json::array();
  for (const StrategySpec& s : strategies)
    strat.push_back(json{{"name", s.name}, {"measure", to_string(s.measure)}});
  j["strategies"] = std::move(strat);
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["threads"] = threads;
  j["scale"] = scale;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig c = defaults();
  if (j.contains("dataset")) c.dataset = dataset_from_json(j["dataset"], c.dataset);
  if (j.contains("train_path")) c.train_path = j["train_path"].get<std::string>();
  if (j.contains("test_path")) c.test_path = j["test_path"].get<std::string>();
  if (j.contains("grid")) c.grid = axes_from_json(j["grid"]);
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const json& s : j["strategies"]) {
      StrategySpec spec;
      spec.name = s.at("name").get<std::string>();
      if (s.contains("measure"))
        spec.measure = measure_from_string(s["measure"].get<std::string>());
      c.strategies.push_back(std::move(spec));
    }
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("scale")) c.scale = j["scale"].get<double>();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

// --------------------------------------------------------------------------
// Report formatting
// --------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "method,measure,selected_size,validation_error,test_error,seconds\n";
  for (const StrategyResult& r : rows)
    os << r.name << ',' << to_string(r.measure) << ',' << r.selected_size << ','
       << fmt(r.validation_error) << ',' << fmt(r.test_error) << ',' << fmt(r.seconds)
       << '\n';
  return os.str();
}

std::string ExperimentReport::to_json_string() const {
  json rows_json = json::array();
  for (const StrategyResult& r : rows)
    rows_json.push_back(json{{"method", r.name},
                             {"measure", to_string(r.measure)},
                             {"selected_size", r.selected_size},
                             {"validation_error", r.validation_error},
                             {"test_error", r.test_error},
                             {"seconds", r.seconds},
                             {"trace_length", r.trace_length},
                             {"subset", r.subset}});
  json j;
  j["rows"] = std::move(rows_json);
  j["train_fingerprint"] = train_fingerprint;
  j["test_fingerprint"] = test_fingerprint;
  j["grid_fingerprint"] = grid_fingerprint;
  j["grid_size"] = grid_size;
  j["total_seconds"] = total_seconds;
  j["config"] = json::parse(config_echo);
  return j.dump(2);
}

// --------------------------------------------------------------------------
// Protocol
// --------------------------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_half_split(
    std::span<const ClassLabel> labels, int class_count, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<std::size_t> half_a, half_b;
  for (int k = 0; k < class_count; ++k) {
    auto& idx = by_class[k];
    SplitMix64 rng = stream_rng(seed, 0x5350u + static_cast<std::uint64_t>(k));
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.uniform_int(0, i - 1)]);
    const std::size_t na = (idx.size() + 1) / 2;
    half_a.insert(half_a.end(), idx.begin(), idx.begin() + na);
    half_b.insert(half_b.end(), idx.begin() + na, idx.end());
  }
  std::sort(half_a.begin(), half_a.end());
  std::sort(half_b.begin(), half_b.end());
  return {std::move(half_a), std::move(half_b)};
}

namespace {

LabeledSeriesSet load_series_any(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return load_dataset_json(path);
  return load_dataset_csv(path);
}

std::string row_tag(const StrategySpec& s) {
  return s.name + "_" + to_string(s.measure);
}

StrategyResult run_strategy(const StrategySpec& spec, const BinaryDataset& half_a,
                            const BinaryDataset& half_b, const BinaryDataset& test,
                            const NBCModel& model, const std::string& out_dir) {
  StrategyResult result;
  result.name = spec.name;
  result.measure = spec.measure;
  const double t0 = now_seconds();

  SubsetChoice choice;
  if (spec.name == "mi_filter" || spec.name == "mrmr_filter") {
    const Ranking ranking = spec.name == "mi_filter"
                                ? mi_rank(half_a)
                                : mrmr_rank(half_a, half_a.cols());
    choice = select_best_subset(ranking, model, half_b);
    result.trace_length = ranking.order.size();
    write_ranking_jsonl(ranking, out_dir + "/traces/" + row_tag(spec) + ".jsonl");
  } else {
    SelectionTrace trace;
    if (spec.name == "forward")
      trace = forward_search(half_a, model, spec.measure, model.features());
    else if (spec.name == "backward")
      trace = backward_search(half_a, model, spec.measure);
    else if (spec.name == "forward_backward")
      trace = floating_search(half_a, model, spec.measure, FloatStart::kForward);
    else
      trace = floating_search(half_a, model, spec.measure, FloatStart::kBackward);
    choice = select_best_subset(trace, model, half_b);
    result.trace_length = trace.steps.size();
    write_trace_jsonl(trace, out_dir + "/traces/" + row_tag(spec) + ".jsonl");
  }

  result.selected_size = choice.subset.size();
  result.validation_error = choice.validation_error;
  result.subset = choice.subset.ordered();
  std::sort(result.subset.begin(), result.subset.end());

  JointCache test_cache(model, test, FeatureSubset::of(model.features(), result.subset));
  result.test_error = classification_error(test_cache, test.labels);
  result.seconds = now_seconds() - t0;

  json sj{{"method", spec.name},
          {"measure", to_string(spec.measure)},
          {"grid_fingerprint", model.grid_fingerprint()},
          {"features", result.subset}};
  std::ofstream os(out_dir + "/subsets/" + row_tag(spec) + ".subset.json");
  if (!os) throw IoError("cannot write subset file for " + row_tag(spec));
  os << sj.dump(2);
  return result;
}

}  // namespace

ExperimentReport run_protocol(const ExperimentConfig& raw_config) {
  ExperimentConfig config = raw_config;
  config.apply_scale();
  config.validate();
  if (config.threads > 0) omp_set_num_threads(config.threads);

  fs::create_directories(config.out_dir);
  fs::create_directories(config.out_dir + "/traces");
  fs::create_directories(config.out_dir + "/subsets");

  const double t0 = now_seconds();

  // Train and test sets share characteristics but not random streams.
  LabeledSeriesSet train, test;
  if (!config.train_path.empty()) {
    train = load_series_any(config.train_path);
  } else {
    DatasetSpec spec = config.dataset;
    spec.seed = mix64(config.seed, 1);
    train = gen_dataset(spec);
  }
  if (!config.test_path.empty()) {
    test = load_series_any(config.test_path);
  } else {
    DatasetSpec spec = config.dataset;
    spec.seed = mix64(config.seed, 2);
    test = gen_dataset(spec);
  }

  const IndicatorGrid grid =
      IndicatorGrid::build(config.grid.families, config.grid.windows, config.grid.thresholds,
                           config.grid.confirmations);
  const BinaryDataset btrain = binarize(train, grid);
  const BinaryDataset btest = binarize(test, grid);
  save_bits(btrain, config.out_dir + "/train.bits");
  save_bits(btest, config.out_dir + "/test.bits");

  const auto [idx_a, idx_b] =
      stratified_half_split(btrain.labels, btrain.class_count, mix64(config.seed, 3));
  const BinaryDataset half_a = subset_rows(btrain, idx_a);
  const BinaryDataset half_b = subset_rows(btrain, idx_b);

  const NBCModel model = NBCModel::fit(half_a, config.alpha);
  {
    std::ofstream os(config.out_dir + "/model.json");
    if (!os) throw IoError("cannot write model.json");
    os << model.to_json_string();
  }

  ExperimentReport report;
  report.train_fingerprint = dataset_fingerprint(train);
  report.test_fingerprint = dataset_fingerprint(test);
  report.grid_fingerprint = grid.fingerprint();
  report.grid_size = grid.size();
  report.config_echo = config.to_json_string();

  for (const StrategySpec& spec : config.strategies)
    report.rows.push_back(run_strategy(spec, half_a, half_b, btest, model, config.out_dir));

  report.total_seconds = now_seconds() - t0;
  {
    std::ofstream os(config.out_dir + "/report.csv");
    if (!os) throw IoError("cannot write report.csv");
    os << report.to_csv();
  }
  {
    std::ofstream os(config.out_dir + "/report.json");
    if (!os) throw IoError("cannot write report.json");
    os << report.to_json_string();
  }
  return report;
}

}  // namespace indsel
