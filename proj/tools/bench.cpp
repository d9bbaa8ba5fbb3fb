// SPDX-License-Identifier: Apache-2.0
//
// Serial-reference vs OpenMP-kernel benchmark: binarization, model fitting,
// filter ranking and one forward-search pass, timed at 1 thread and at the
// machine's full thread count.

#include <omp.h>

#include <cstdio>
#include <functional>
#include <string>

#include "indsel/reference.hpp"

using namespace indsel;

namespace {

double bench_seconds(int threads, const std::function<void()>& fn) {
  omp_set_num_threads(threads);
  const double t0 = omp_get_wtime();
  fn();
  return omp_get_wtime() - t0;
}

void report(const char* name, double ref_s, double one_s, double par_s, int threads) {
  std::printf("%-22s %10.3fs %12.3fs %14.3fs %8.2fx %9.2fx\n", name, ref_s, one_s, par_s,
              ref_s / par_s, one_s / par_s);
  (void)threads;
}

}  // namespace

int main(int argc, char** argv) {
  int n_series = 240;
  if (argc > 1) n_series = std::stoi(argv[1]);
  const int max_threads = omp_get_max_threads();

  DatasetSpec spec;
  spec.n_normal = n_series / 2;
  spec.n_per_anomaly_class = n_series / 6;
  spec.seed = 99;
  const LabeledSeriesSet series = gen_dataset(spec);

  const IndicatorGrid grid = IndicatorGrid::build(
      {TestFamily::kMannWhitneyU, TestFamily::kKolmogorovSmirnov, TestFamily::kFVariance},
      {20, 30, 40, 50, 60, 70}, {0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7},
      {false, true});

  std::printf("%d series, %zu indicators, %d threads\n\n", spec.total(), grid.size(),
              max_threads);
  std::printf("%-22s %11s %13s %15s %9s %10s\n", "kernel", "reference", "1 thread",
              "all threads", "vs ref", "vs 1thr");

  BinaryDataset data;
  {
    BinaryDataset tmp;
    const double ref_s = bench_seconds(1, [&] { tmp = ref::binarize(series, grid); });
    const double one_s = bench_seconds(1, [&] { tmp = binarize(series, grid); });
    const double par_s = bench_seconds(max_threads, [&] { data = binarize(series, grid); });
    report("binarize", ref_s, one_s, par_s, max_threads);
    if (!(tmp.bits == data.bits)) {
      std::printf("MISMATCH between serial and parallel binarize\n");
      return 1;
    }
  }

  NBCModel model;
  {
    NBCModel a, b;
    const double ref_s = bench_seconds(1, [&] { a = ref::fit(data, 1.0); });
    const double one_s = bench_seconds(1, [&] { b = NBCModel::fit(data, 1.0); });
    const double par_s = bench_seconds(max_threads, [&] { model = NBCModel::fit(data, 1.0); });
    report("nbc fit", ref_s, one_s, par_s, max_threads);
  }

  {
    Ranking r;
    const double ref_s = bench_seconds(1, [&] {
      for (std::size_t j = 0; j < data.cols(); ++j)
        ref::mutual_information(data.bits, j, data.labels, data.class_count);
    });
    const double one_s = bench_seconds(1, [&] { r = mi_rank(data); });
    const double par_s = bench_seconds(max_threads, [&] { r = mi_rank(data); });
    report("mi rank", ref_s, one_s, par_s, max_threads);
  }

  {
    const std::size_t depth = std::min<std::size_t>(40, data.cols());
    Ranking r;
    const double ref_s = bench_seconds(1, [&] {
      std::vector<std::size_t> sel;
      for (std::size_t s = 0; s < depth; ++s) sel.push_back(ref::mrmr_step(data, sel));
    });
    const double one_s = bench_seconds(1, [&] { r = mrmr_rank(data, depth); });
    const double par_s = bench_seconds(max_threads, [&] { r = mrmr_rank(data, depth); });
    report("mrmr rank (depth 40)", ref_s, one_s, par_s, max_threads);
  }

  {
    const std::size_t cap = std::min<std::size_t>(12, data.cols());
    SelectionTrace t;
    const double ref_s = bench_seconds(1, [&] {
      FeatureSubset s(model.features());
      for (std::size_t step = 0; step < cap; ++step)
        s.add(ref::best_add(model, data, s, Measure::kErrorProbability).feature);
    });
    const double one_s = bench_seconds(
        1, [&] { t = forward_search(data, model, Measure::kErrorProbability, cap); });
    const double par_s = bench_seconds(
        max_threads, [&] { t = forward_search(data, model, Measure::kErrorProbability, cap); });
    report("forward search (12)", ref_s, one_s, par_s, max_threads);
  }

  return 0;
}
