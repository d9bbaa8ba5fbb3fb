// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "indsel/rng.hpp"

namespace indsel {

enum class SeriesClass : std::uint8_t {
  kNormal = 0,
  kMeanChange = 1,
  kVarianceChange = 2,
  kTrendShift = 3,
};
inline constexpr int kNumClasses = 4;

const char* to_string(SeriesClass c);
SeriesClass series_class_from_int(int v);

struct TimeSeries {
  std::vector<double> values;
  SeriesClass label = SeriesClass::kNormal;
  std::optional<int> change_point;        // present iff label != kNormal
  std::optional<double> anomaly_magnitude;

  int length() const { return static_cast<int>(values.size()); }
};

// Generation parameters for the four-class benchmark. Defaults match the
// bundled full-scale setup: 3000 normal + 3×1000 anomalous series of length
// 100..200 with unit-variance baseline noise.
struct DatasetSpec {
  int n_normal = 3000;
  int n_per_anomaly_class = 1000;
  int min_length = 100;
  int max_length = 200;
  double mean_shift_min = 1.0, mean_shift_max = 5.0;
  double sigma_shift_min = 2.0, sigma_shift_max = 6.0;
  double trend_amplitude_min = 1.0, trend_amplitude_max = 5.0;
  std::uint64_t seed = 0;

  int total() const { return n_normal + 3 * n_per_anomaly_class; }
  void validate() const;  // throws ConfigError
};

struct LabeledSeriesSet {
  std::vector<TimeSeries> series;
  DatasetSpec spec;

  std::size_t size() const { return series.size(); }
};

// One series from an explicit random stream. Draw order, fixed for
// reproducibility: length, change point, anomaly magnitude, then the values
// front to back. The change point is uniform on the closed central band
// [round(0.2 L), round(0.8 L)].
TimeSeries gen_series(SeriesClass cls, const DatasetSpec& spec, SplitMix64& rng);

// Whole benchmark set, laid out class-by-class (normal block first). Series i
// is generated from stream_rng(spec.seed, i), so regeneration is bit-identical
// and independent of thread count.
LabeledSeriesSet gen_dataset(const DatasetSpec& spec);

std::uint64_t dataset_fingerprint(const LabeledSeriesSet& set);

// Columnar text persistence: <prefix>.meta.csv carries the spec (as '#'
// key=value lines) and one metadata row per series; <prefix>.values.csv
// carries one comma-separated line of values per series, printed with %.17g
// so doubles round-trip exactly.
void save_dataset_csv(const LabeledSeriesSet& set, const std::string& prefix);
LabeledSeriesSet load_dataset_csv(const std::string& prefix);

// Single-file JSON alternative.
void save_dataset_json(const LabeledSeriesSet& set, const std::string& path);
LabeledSeriesSet load_dataset_json(const std::string& path);

}  // namespace indsel
