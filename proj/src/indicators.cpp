// SPDX-License-Identifier: Apache-2.0
#include "indsel/indicators.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "indsel/errors.hpp"

namespace indsel {

using nlohmann::json;

IndicatorGrid IndicatorGrid::build(std::vector<TestFamily> families, std::vector<int> windows,
                                   std::vector<double> thresholds,
                                   std::vector<bool> confirmations) {
  if (families.empty() || windows.empty() || thresholds.empty() || confirmations.empty())
    throw ConfigError("indicator grid: every axis must be nonempty");

  std::sort(families.begin(), families.end());
  if (std::adjacent_find(families.begin(), families.end()) != families.end())
    throw ConfigError("indicator grid: duplicate family");
  std::sort(windows.begin(), windows.end());
  if (std::adjacent_find(windows.begin(), windows.end()) != windows.end())
    throw ConfigError("indicator grid: duplicate window size");
  std::sort(confirmations.begin(), confirmations.end());
  if (std::adjacent_find(confirmations.begin(), confirmations.end()) != confirmations.end())
    throw ConfigError("indicator grid: duplicate confirmation flag");
  for (std::size_t i = 0; i + 1 < thresholds.size(); ++i)
    if (!(thresholds[i] < thresholds[i + 1]))
      throw ConfigError("indicator grid: thresholds must be strictly increasing");
  for (double t : thresholds)
    if (!(t > 0.0 && t < 1.0))
      throw ConfigError("indicator grid: thresholds must lie strictly inside (0,1)");

  IndicatorGrid g;
  g.families_ = std::move(families);
  g.windows_ = std::move(windows);
  g.thresholds_ = std::move(thresholds);
  g.confirmations_ = std::move(confirmations);

  const int n_conf = static_cast<int>(g.confirmations_.size());
  for (std::size_t qi = 0; qi < g.families_.size(); ++qi) {
    for (std::size_t wi = 0; wi < g.windows_.size(); ++wi) {
      for (std::size_t ci = 0; ci < g.confirmations_.size(); ++ci) {
        for (std::size_t ti = 0; ti < g.thresholds_.size(); ++ti) {
          ScoreSpec s;
          s.family = g.families_[qi];
          s.window_size = g.windows_[wi];
          s.confirmation = g.confirmations_[ci];
          s.validate();
          g.indicators_.push_back({s, g.thresholds_[ti]});
          g.coords_.push_back({static_cast<int>(qi),
                               static_cast<int>(wi) * n_conf + static_cast<int>(ci),
                               static_cast<int>(ti)});
        }
      }
    }
  }
  return g;
}

std::uint64_t IndicatorGrid::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (TestFamily f : families_) mix(static_cast<std::uint64_t>(f));
  for (int w : windows_) mix(static_cast<std::uint64_t>(w));
  for (double t : thresholds_) {
    std::uint64_t bits;
    std::memcpy(&bits, &t, sizeof(bits));
    mix(bits);
  }
  for (bool c : confirmations_) mix(c ? 1 : 0);
  return h;
}

std::string IndicatorGrid::to_json_string() const {
  json j;
  json fam = json::array();
  for (TestFamily f : families_) fam.push_back(to_string(f));
  j["families"] = std::move(fam);
  j["windows"] = windows_;
  j["thresholds"] = thresholds_;
  j["confirmations"] = confirmations_;
  j["columns"] = indicators_.size();
  j["fingerprint"] = fingerprint();
  return j.dump(2);
}

IndicatorGrid IndicatorGrid::from_json_string(const std::string& text) {
  json j = json::parse(text);
  std::vector<TestFamily> fams;
  for (const json& f : j.at("families")) fams.push_back(family_from_string(f.get<std::string>()));
  IndicatorGrid g = build(std::move(fams), j.at("windows").get<std::vector<int>>(),
                          j.at("thresholds").get<std::vector<double>>(),
                          j.at("confirmations").get<std::vector<bool>>());
  if (j.contains("fingerprint") && j["fingerprint"].get<std::uint64_t>() != g.fingerprint())
    throw IoError("indicator grid fingerprint mismatch");
  return g;
}

// --------------------------------------------------------------------------
// Binarization
// --------------------------------------------------------------------------

namespace {

// Columns regrouped so each unique score is evaluated once per series, and
// each window size makes a single sliding pass covering all three families.
struct ScorePlan {
  struct Entry {
    TestFamily family;
    bool confirmation;
    std::vector<std::pair<std::size_t, double>> columns;  // (column, threshold)
  };
  struct WindowGroup {
    int w;
    std::array<bool, kNumFamilies> want{};
    std::vector<Entry> entries;
  };
  std::vector<WindowGroup> groups;

  static ScorePlan from_grid(const IndicatorGrid& grid) {
    std::map<int, std::map<std::pair<int, bool>, Entry>> by_window;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const ScoreSpec& s = grid[j].score;
      auto& entry = by_window[s.window_size][{static_cast<int>(s.family), s.confirmation}];
      entry.family = s.family;
      entry.confirmation = s.confirmation;
      entry.columns.emplace_back(j, grid[j].threshold);
    }
    ScorePlan plan;
    for (auto& [w, entries] : by_window) {
      WindowGroup g;
      g.w = w;
      for (auto& [key, entry] : entries) {
        g.want[key.first] = true;
        g.entries.push_back(std::move(entry));
      }
      plan.groups.push_back(std::move(g));
    }
    return plan;
  }
};

}  // namespace

BinaryDataset binarize(const LabeledSeriesSet& series_set, const IndicatorGrid& grid) {
  const std::size_t n = series_set.size();
  const std::size_t p = grid.size();
  BinaryDataset data;
  data.grid = grid;
  data.bits = BitMatrix(n, p);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    data.labels[i] = static_cast<ClassLabel>(series_set.series[i].label);

  const ScorePlan plan = ScorePlan::from_grid(grid);
  const std::size_t n_blocks = (n + 63) / 64;

  // Each thread owns whole 64-row blocks, so every column word is written by
  // exactly one thread.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t blk = 0; blk < n_blocks; ++blk) {
    std::array<std::vector<double>, kNumFamilies> sweeps;
    const std::size_t i_end = std::min(n, (blk + 1) * 64);
    for (std::size_t i = blk * 64; i < i_end; ++i) {
      const TimeSeries& series = series_set.series[i];
      for (const auto& group : plan.groups) {
        sweep_pvalues_multi(series.values, group.w, group.want, sweeps);
        for (const auto& entry : group.entries) {
          const double pv = collapse_sweep(sweeps[static_cast<int>(entry.family)], group.w,
                                           entry.confirmation);
          for (const auto& [col, threshold] : entry.columns)
            if (pv <= threshold) data.bits.set(i, col, true);
        }
      }
    }
  }
  return data;
}

BinaryDataset subset_rows(const BinaryDataset& data, std::span<const std::size_t> indices) {
  BinaryDataset out;
  out.grid = data.grid;
  out.class_count = data.class_count;
  out.bits = BitMatrix(indices.size(), data.cols());
  out.labels.resize(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) out.labels[j] = data.labels[indices[j]];
  for (std::size_t p = 0; p < data.cols(); ++p)
    for (std::size_t j = 0; j < indices.size(); ++j)
      if (data.bits.get(indices[j], p)) out.bits.set(j, p, true);
  return out;
}

// --------------------------------------------------------------------------
// Persistence
// --------------------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'I', 'D', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
}
}  // namespace

void save_bits(const BinaryDataset& data, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::uint64_t>(data.rows()));
  write_pod(os, static_cast<std::uint64_t>(data.cols()));
  write_pod(os, static_cast<std::uint32_t>(data.class_count));

  const std::size_t row_words = (data.cols() + 63) / 64;
  std::vector<std::uint64_t> row(row_words);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t p = 0; p < data.cols(); ++p)
      if (data.bits.get(i, p)) row[p >> 6] |= std::uint64_t{1} << (p & 63);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row_words * 8));
  }
  os.write(reinterpret_cast<const char*>(data.labels.data()),
           static_cast<std::streamsize>(data.labels.size()));
  if (!os) throw IoError("short write to " + path);

  std::ofstream sidecar(path + ".grid.json");
  if (!sidecar) throw IoError("cannot write " + path + ".grid.json");
  sidecar << data.grid.to_json_string();
}

BinaryDataset load_bits(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path + ": bad magic");
  std::uint32_t version = 0;
  read_pod(is, version);
  if (version != kVersion) throw IoError(path + ": unsupported version");
  std::uint64_t n = 0, p = 0;
  std::uint32_t k = 0;
  read_pod(is, n);
  read_pod(is, p);
  read_pod(is, k);

  std::ifstream sidecar(path + ".grid.json");
  if (!sidecar) throw IoError("cannot read " + path + ".grid.json");
  std::string text((std::istreambuf_iterator<char>(sidecar)), std::istreambuf_iterator<char>());

  BinaryDataset data;
  data.grid = IndicatorGrid::from_json_string(text);
  if (data.grid.size() != p) throw IoError(path + ": sidecar grid size mismatch");
  data.class_count = static_cast<int>(k);
  data.bits = BitMatrix(n, p);
  const std::size_t row_words = (p + 63) / 64;
  std::vector<std::uint64_t> row(row_words);
  for (std::uint64_t i = 0; i < n; ++i) {
    is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_words * 8));
    for (std::uint64_t c = 0; c < p; ++c)
      if ((row[c >> 6] >> (c & 63)) & 1u) data.bits.set(i, c, true);
  }
  data.labels.resize(n);
  is.read(reinterpret_cast<char*>(data.labels.data()), static_cast<std::streamsize>(n));
  if (!is) throw IoError(path + ": truncated file");
  return data;
}

void export_bits_csv(const BinaryDataset& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  for (std::size_t j = 0; j < data.cols(); ++j) os << 'b' << j << ',';
  os << "label\n";
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) os << (data.bits.get(i, j) ? '1' : '0') << ',';
    os << static_cast<int>(data.labels[i]) << '\n';
  }
}

std::uint64_t bits_fingerprint(const BinaryDataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(data.rows());
  mix(data.cols());
  for (std::size_t p = 0; p < data.cols(); ++p)
    for (std::uint64_t w : data.bits.column(p)) mix(w);
  for (ClassLabel l : data.labels) mix(l);
  return h;
}

}  // namespace indsel
