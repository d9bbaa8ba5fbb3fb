// SPDX-License-Identifier: Apache-2.0
#include "indsel/datagen.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "indsel/errors.hpp"

namespace indsel {

using nlohmann::json;

const char* to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::kNormal: return "normal";
    case SeriesClass::kMeanChange: return "mean_change";
    case SeriesClass::kVarianceChange: return "variance_change";
    case SeriesClass::kTrendShift: return "trend_shift";
  }
  return "?";
}

SeriesClass series_class_from_int(int v) {
  if (v < 0 || v >= kNumClasses) throw ConfigError("series class out of range: " + std::to_string(v));
  return static_cast<SeriesClass>(v);
}

void DatasetSpec::validate() const {
  if (n_normal <= 0 || n_per_anomaly_class <= 0)
    throw ConfigError("dataset counts must be positive");
  if (min_length < 2 || min_length > max_length)
    throw ConfigError("invalid length range");
  if (mean_shift_min > mean_shift_max || sigma_shift_min > sigma_shift_max ||
      trend_amplitude_min > trend_amplitude_max)
    throw ConfigError("anomaly magnitude range has lower bound > upper bound");
  if (sigma_shift_min <= 0.0) throw ConfigError("sigma shift must be positive");
}

TimeSeries gen_series(SeriesClass cls, const DatasetSpec& spec, SplitMix64& rng) {
  spec.validate();
  TimeSeries out;
  out.label = cls;
  const int length = static_cast<int>(
      rng.uniform_int(static_cast<std::uint64_t>(spec.min_length),
                      static_cast<std::uint64_t>(spec.max_length)));

  int cp = -1;
  double magnitude = 0.0;
  if (cls != SeriesClass::kNormal) {
    const int lo = static_cast<int>(std::lround(0.2 * length));
    const int hi = static_cast<int>(std::lround(0.8 * length));
    cp = static_cast<int>(rng.uniform_int(lo, hi));
    switch (cls) {
      case SeriesClass::kMeanChange:
        magnitude = rng.uniform(spec.mean_shift_min, spec.mean_shift_max);
        break;
      case SeriesClass::kVarianceChange:
        magnitude = rng.uniform(spec.sigma_shift_min, spec.sigma_shift_max);
        break;
      case SeriesClass::kTrendShift:
        magnitude = rng.uniform(spec.trend_amplitude_min, spec.trend_amplitude_max);
        break;
      default: break;
    }
    out.change_point = cp;
    out.anomaly_magnitude = magnitude;
  }

  out.values.resize(length);
  switch (cls) {
    case SeriesClass::kNormal:
      for (int t = 0; t < length; ++t) out.values[t] = rng.gaussian();
      break;
    case SeriesClass::kMeanChange:
      for (int t = 0; t < length; ++t)
        out.values[t] = t < cp ? rng.gaussian() : rng.gaussian(magnitude, 1.0);
      break;
    case SeriesClass::kVarianceChange:
      for (int t = 0; t < length; ++t)
        out.values[t] = t < cp ? rng.gaussian() : rng.gaussian(0.0, magnitude);
      break;
    case SeriesClass::kTrendShift: {
      // Unit-variance noise throughout plus a ramp from 0 at the change point
      // to the drawn amplitude at the last index.
      const double denom = static_cast<double>(length - 1 - cp);
      for (int t = 0; t < length; ++t) {
        double ramp = 0.0;
        if (t >= cp) ramp = denom > 0.0 ? magnitude * (t - cp) / denom : magnitude;
        out.values[t] = rng.gaussian() + ramp;
      }
      break;
    }
  }
  return out;
}

LabeledSeriesSet gen_dataset(const DatasetSpec& spec) {
  spec.validate();
  LabeledSeriesSet set;
  set.spec = spec;
  const int n = spec.total();
  set.series.resize(n);

  auto class_of_index = [&spec](int i) {
    if (i < spec.n_normal) return SeriesClass::kNormal;
    const int a = (i - spec.n_normal) / spec.n_per_anomaly_class;
    return static_cast<SeriesClass>(1 + a);
  };

#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < n; ++i) {
    SplitMix64 rng = stream_rng(spec.seed, static_cast<std::uint64_t>(i));
    set.series[i] = gen_series(class_of_index(i), spec, rng);
  }
  return set;
}

std::uint64_t dataset_fingerprint(const LabeledSeriesSet& set) {
  // FNV-1a over labels, lengths and raw value bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const TimeSeries& s : set.series) {
    mix(static_cast<std::uint64_t>(s.label));
    mix(static_cast<std::uint64_t>(s.values.size()));
    for (double v : s.values) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, sizeof(bits));
      mix(bits);
    }
  }
  return h;
}

// --------------------------------------------------------------------------
// Persistence
// --------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void spec_to_kv(const DatasetSpec& s, std::ostream& os) {
  os << "# n_normal=" << s.n_normal << "\n";
  os << "# n_per_anomaly_class=" << s.n_per_anomaly_class << "\n";
  os << "# min_length=" << s.min_length << "\n";
  os << "# max_length=" << s.max_length << "\n";
  os << "# mean_shift_min=" << fmt17(s.mean_shift_min) << "\n";
  os << "# mean_shift_max=" << fmt17(s.mean_shift_max) << "\n";
  os << "# sigma_shift_min=" << fmt17(s.sigma_shift_min) << "\n";
  os << "# sigma_shift_max=" << fmt17(s.sigma_shift_max) << "\n";
  os << "# trend_amplitude_min=" << fmt17(s.trend_amplitude_min) << "\n";
  os << "# trend_amplitude_max=" << fmt17(s.trend_amplitude_max) << "\n";
  os << "# seed=" << s.seed << "\n";
}

void apply_kv(DatasetSpec& s, const std::string& key, const std::string& val) {
  if (key == "n_normal") s.n_normal = std::stoi(val);
  else if (key == "n_per_anomaly_class") s.n_per_anomaly_class = std::stoi(val);
  else if (key == "min_length") s.min_length = std::stoi(val);
  else if (key == "max_length") s.max_length = std::stoi(val);
  else if (key == "mean_shift_min") s.mean_shift_min = std::stod(val);
  else if (key == "mean_shift_max") s.mean_shift_max = std::stod(val);
  else if (key == "sigma_shift_min") s.sigma_shift_min = std::stod(val);
  else if (key == "sigma_shift_max") s.sigma_shift_max = std::stod(val);
  else if (key == "trend_amplitude_min") s.trend_amplitude_min = std::stod(val);
  else if (key == "trend_amplitude_max") s.trend_amplitude_max = std::stod(val);
  else if (key == "seed") s.seed = std::stoull(val);
  else throw IoError("unknown dataset spec key: " + key);
}

}  // namespace

void save_dataset_csv(const LabeledSeriesSet& set, const std::string& prefix) {
  std::ofstream meta(prefix + ".meta.csv");
  if (!meta) throw IoError("cannot write " + prefix + ".meta.csv");
  spec_to_kv(set.spec, meta);
  meta << "series_id,class,length,change_point,magnitude\n";
  for (std::size_t i = 0; i < set.series.size(); ++i) {
    const TimeSeries& s = set.series[i];
    meta << i << ',' << static_cast<int>(s.label) << ',' << s.length() << ',';
    if (s.change_point) meta << *s.change_point;
    meta << ',';
    if (s.anomaly_magnitude) meta << fmt17(*s.anomaly_magnitude);
    meta << '\n';
  }

  std::ofstream vals(prefix + ".values.csv");
  if (!vals) throw IoError("cannot write " + prefix + ".values.csv");
  for (const TimeSeries& s : set.series) {
    for (int t = 0; t < s.length(); ++t) {
      if (t) vals << ',';
      vals << fmt17(s.values[t]);
    }
    vals << '\n';
  }
}

LabeledSeriesSet load_dataset_csv(const std::string& prefix) {
  std::ifstream meta(prefix + ".meta.csv");
  if (!meta) throw IoError("cannot read " + prefix + ".meta.csv");
  LabeledSeriesSet set;
  std::string line;
  bool header_seen = false;
  std::vector<int> lengths;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError("malformed spec line: " + line);
      std::string key = line.substr(2, eq - 2);
      apply_kv(set.spec, key, line.substr(eq + 1));
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    TimeSeries s;
    std::getline(ss, field, ',');  // series_id, implied by order
    std::getline(ss, field, ',');
    s.label = series_class_from_int(std::stoi(field));
    std::getline(ss, field, ',');
    lengths.push_back(std::stoi(field));
    std::getline(ss, field, ',');
    if (!field.empty()) s.change_point = std::stoi(field);
    std::getline(ss, field, ',');
    if (!field.empty()) s.anomaly_magnitude = std::stod(field);
    set.series.push_back(std::move(s));
  }

  std::ifstream vals(prefix + ".values.csv");
  if (!vals) throw IoError("cannot read " + prefix + ".values.csv");
  std::size_t i = 0;
  while (std::getline(vals, line)) {
    if (i >= set.series.size()) throw IoError("more value rows than metadata rows");
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
      set.series[i].values.push_back(std::stod(field));
    if (set.series[i].length() != lengths[i])
      throw IoError("length mismatch between meta and values at row " + std::to_string(i));
    ++i;
  }
  if (i != set.series.size()) throw IoError("fewer value rows than metadata rows");
  return set;
}

namespace {

json spec_to_json(const DatasetSpec& s) {
  return json{{"n_normal", s.n_normal},
              {"n_per_anomaly_class", s.n_per_anomaly_class},
              {"min_length", s.min_length},
              {"max_length", s.max_length},
              {"mean_shift_range", {s.mean_shift_min, s.mean_shift_max}},
              {"sigma_shift_range", {s.sigma_shift_min, s.sigma_shift_max}},
              {"trend_amplitude_range", {s.trend_amplitude_min, s.trend_amplitude_max}},
              {"seed", s.seed}};
}

DatasetSpec spec_from_json(const json& j) {
  DatasetSpec s;
  s.n_normal = j.at("n_normal").get<int>();
  s.n_per_anomaly_class = j.at("n_per_anomaly_class").get<int>();
  s.min_length = j.at("min_length").get<int>();
  s.max_length = j.at("max_length").get<int>();
  s.mean_shift_min = j.at("mean_shift_range")[0].get<double>();
  s.mean_shift_max = j.at("mean_shift_range")[1].get<double>();
  s.sigma_shift_min = j.at("sigma_shift_range")[0].get<double>();
  s.sigma_shift_max = j.at("sigma_shift_range")[1].get<double>();
  s.trend_amplitude_min = j.at("trend_amplitude_range")[0].get<double>();
  s.trend_amplitude_max = j.at("trend_amplitude_range")[1].get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

void save_dataset_json(const LabeledSeriesSet& set, const std::string& path) {
  json root;
  root["spec"] = spec_to_json(set.spec);
  json arr = json::array();
  for (std::size_t i = 0; i < set.series.size(); ++i) {
    const TimeSeries& s = set.series[i];
    json e{{"id", i}, {"class", static_cast<int>(s.label)}, {"values", s.values}};
    if (s.change_point) e["change_point"] = *s.change_point;
    if (s.anomaly_magnitude) e["magnitude"] = *s.anomaly_magnitude;
    arr.push_back(std::move(e));
  }
  root["series"] = std::move(arr);
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << root.dump();
}

LabeledSeriesSet load_dataset_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  json root = json::parse(is);
  LabeledSeriesSet set;
  set.spec = spec_from_json(root.at("spec"));
  for (const json& e : root.at("series")) {
    TimeSeries s;
    s.label = series_class_from_int(e.at("class").get<int>());
    s.values = e.at("values").get<std::vector<double>>();
    if (e.contains("change_point")) s.change_point = e["change_point"].get<int>();
    if (e.contains("magnitude")) s.anomaly_magnitude = e["magnitude"].get<double>();
    set.series.push_back(std::move(s));
  }
  return set;
}

}  // namespace indsel
