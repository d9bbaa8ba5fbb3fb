// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset generation, binarization, single-strategy
// selection, subset evaluation, and the full benchmark protocol.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "indsel/errors.hpp"
#include "indsel/harness.hpp"
#include "indsel/reference.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace indsel;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 0;
  double scale = 0.0;
  bool scale_set = false;
};

ExperimentConfig resolve_config(const CommonOpts& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig::defaults()
                                             : ExperimentConfig::from_file(o.config_path);
  if (o.seed_set) c.seed = o.seed;
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.threads > 0) c.threads = o.threads;
  if (o.scale_set) c.scale = o.scale;
  return c;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "experiment config JSON");
  cmd->add_option("--seed", o.seed, "master seed")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--out", o.out, "output directory / path prefix");
  cmd->add_option("--threads", o.threads, "OpenMP thread count (0 = default)");
  cmd->add_option("--scale", o.scale, "shrink factor for dataset and grid, in (0,1]")
      ->each([&o](const std::string&) { o.scale_set = true; });
}

LabeledSeriesSet load_series_auto(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return load_dataset_json(path);
  return load_dataset_csv(path);
}

void print_report(const ExperimentReport& report) {
  std::printf("%-18s %-14s %10s %12s %10s %9s\n", "method", "measure", "features",
              "val_error", "test_err", "sec");
  for (const StrategyResult& r : report.rows)
    std::printf("%-18s %-14s %10zu %12.4f %10.4f %9.1f\n", r.name.c_str(),
                to_string(r.measure), r.selected_size, r.validation_error, r.test_error,
                r.seconds);
  std::printf("grid: %zu indicators, total %.1f s\n", report.grid_size,
              report.total_seconds);
}

int cmd_generate(const CommonOpts& o, const std::string& format) {
  ExperimentConfig c = resolve_config(o);
  c.apply_scale();
  DatasetSpec spec = c.dataset;
  spec.seed = c.seed;
  const LabeledSeriesSet set = gen_dataset(spec);
  const std::string prefix = o.out.empty() ? "dataset" : o.out;
  if (format == "csv" || format == "both") save_dataset_csv(set, prefix);
  if (format == "json" || format == "both") save_dataset_json(set, prefix + ".json");
  std::printf("wrote %zu series (seed %llu) to %s[.meta.csv/.values.csv/.json]\n",
              set.size(), static_cast<unsigned long long>(spec.seed), prefix.c_str());
  return 0;
}

int cmd_binarize(const CommonOpts& o, const std::string& data_path) {
  ExperimentConfig c = resolve_config(o);
  c.apply_scale();
  if (c.threads > 0) omp_set_num_threads(c.threads);
  const LabeledSeriesSet set = load_series_auto(data_path);
  const IndicatorGrid grid = IndicatorGrid::build(c.grid.families, c.grid.windows,
                                                  c.grid.thresholds, c.grid.confirmations);
  const BinaryDataset bits = binarize(set, grid);
  const std::string out = o.out.empty() ? "dataset.bits" : o.out;
  save_bits(bits, out);
  std::printf("binarized %zu series x %zu indicators -> %s\n", bits.rows(), bits.cols(),
              out.c_str());
  return 0;
}

int cmd_select(const CommonOpts& o, const std::string& data_path,
               const std::string& strategy, const std::string& measure_name) {
  ExperimentConfig c = resolve_config(o);
  if (c.threads > 0) omp_set_num_threads(c.threads);
  const BinaryDataset data = load_bits(data_path);

  const std::string out_dir = o.out.empty() ? "select_out" : o.out;
  fs::create_directories(out_dir + "/traces");
  fs::create_directories(out_dir + "/subsets");

  const auto [idx_a, idx_b] =
      stratified_half_split(data.labels, data.class_count, mix64(c.seed, 3));
  const BinaryDataset half_a = subset_rows(data, idx_a);
  const BinaryDataset half_b = subset_rows(data, idx_b);
  const NBCModel model = NBCModel::fit(half_a, c.alpha);
  {
    std::ofstream os(out_dir + "/model.json");
    os << model.to_json_string();
  }

  StrategySpec spec{strategy, measure_from_string(measure_name)};
  ExperimentConfig one = c;
  one.strategies = {spec};
  one.validate();

  SubsetChoice choice;
  std::size_t trace_length = 0;
  if (strategy == "mi_filter" || strategy == "mrmr_filter") {
    const Ranking ranking =
        strategy == "mi_filter" ? mi_rank(half_a) : mrmr_rank(half_a, half_a.cols());
    choice = select_best_subset(ranking, model, half_b);
    trace_length = ranking.order.size();
    write_ranking_jsonl(ranking,
                        out_dir + "/traces/" + strategy + "_" + measure_name + ".jsonl");
  } else {
    SelectionTrace trace;
    if (strategy == "forward")
      trace = forward_search(half_a, model, spec.measure, model.features());
    else if (strategy == "backward")
      trace = backward_search(half_a, model, spec.measure);
    else if (strategy == "forward_backward")
      trace = floating_search(half_a, model, spec.measure, FloatStart::kForward);
    else
      trace = floating_search(half_a, model, spec.measure, FloatStart::kBackward);
    choice = select_best_subset(trace, model, half_b);
    trace_length = trace.steps.size();
    write_trace_jsonl(trace, out_dir + "/traces/" + strategy + "_" + measure_name + ".jsonl");
  }

  std::vector<std::size_t> subset = choice.subset.ordered();
  std::sort(subset.begin(), subset.end());
  json sj{{"method", strategy},
          {"measure", measure_name},
          {"grid_fingerprint", model.grid_fingerprint()},
          {"features", subset}};
  std::ofstream os(out_dir + "/subsets/" + strategy + "_" + measure_name + ".subset.json");
  os << sj.dump(2);
  std::printf("%s (%s): selected %zu features, validation error %.6f (trace %zu steps)\n",
              strategy.c_str(), measure_name.c_str(), subset.size(),
              choice.validation_error, trace_length);
  return 0;
}

int cmd_evaluate(const CommonOpts& o, const std::string& data_path,
                 const std::string& subset_path, const std::string& model_path) {
  ExperimentConfig c = resolve_config(o);
  const BinaryDataset data = load_bits(data_path);

  std::ifstream sf(subset_path);
  if (!sf) throw IoError("cannot read " + subset_path);
  json sj = json::parse(sf);
  const auto features = sj.at("features").get<std::vector<std::size_t>>();

  NBCModel model;
  if (!model_path.empty()) {
    std::ifstream mf(model_path);
    if (!mf) throw IoError("cannot read " + model_path);
    std::string text((std::istreambuf_iterator<char>(mf)), std::istreambuf_iterator<char>());
    model = NBCModel::from_json_string(text);
  } else {
    model = NBCModel::fit(data, c.alpha);
  }
  if (model.features() != data.cols())
    throw ConfigError("model/data width mismatch");
  if (sj.contains("grid_fingerprint") &&
      sj["grid_fingerprint"].get<std::uint64_t>() != data.grid.fingerprint())
    throw ConfigError("subset was built for a different indicator grid");

  JointCache cache(model, data, FeatureSubset::of(model.features(), features));
  const double err = classification_error(cache, data.labels);
  std::printf("%.17g\n", err);
  if (!o.out.empty()) {
    json out{{"test_error", err}, {"features", features}, {"instances", data.rows()}};
    std::ofstream os(o.out);
    os << out.dump(2);
  }
  return 0;
}

int cmd_reproduce(const CommonOpts& o) {
  ExperimentConfig c = resolve_config(o);
  const ExperimentReport report = run_protocol(c);
  print_report(report);
  std::printf("report written to %s/report.{csv,json}\n", c.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary-indicator feature selection benchmark"};
  app.require_subcommand(1);

  CommonOpts gen_opts, bin_opts, sel_opts, eval_opts, rep_opts;
  std::string gen_format = "csv";
  std::string bin_data, sel_data, eval_data;
  std::string sel_strategy = "forward", sel_measure = "error";
  std::string eval_subset, eval_model;

  CLI::App* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  add_common(gen, gen_opts);
  gen->add_option("--format", gen_format, "csv | json | both")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  CLI::App* bin = app.add_subcommand("binarize", "binarize a dataset into indicator bits");
  add_common(bin, bin_opts);
  bin->add_option("--data", bin_data, "series file (.json or CSV prefix)")->required();

  CLI::App* sel = app.add_subcommand("select", "run one selection strategy");
  add_common(sel, sel_opts);
  sel->add_option("--data", sel_data, "packed bits file")->required();
  sel->add_option("--strategy", sel_strategy,
                  "mi_filter | mrmr_filter | forward | backward | forward_backward | "
                  "backward_forward");
  sel->add_option("--measure", sel_measure, "error | probability | log_likelihood");

  CLI::App* eval = app.add_subcommand("evaluate", "score a serialized subset on a dataset");
  add_common(eval, eval_opts);
  eval->add_option("--data", eval_data, "packed bits file")->required();
  eval->add_option("--subset", eval_subset, "subset JSON")->required();
  eval->add_option("--model", eval_model, "model JSON (defaults to fitting on --data)");

  CLI::App* rep = app.add_subcommand("reproduce", "run the full benchmark protocol");
  add_common(rep, rep_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_opts, gen_format);
    if (bin->parsed()) return cmd_binarize(bin_opts, bin_data);
    if (sel->parsed()) return cmd_select(sel_opts, sel_data, sel_strategy, sel_measure);
    if (eval->parsed()) return cmd_evaluate(eval_opts, eval_data, eval_subset, eval_model);
    if (rep->parsed()) return cmd_reproduce(rep_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
