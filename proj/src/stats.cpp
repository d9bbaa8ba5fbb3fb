// SPDX-License-Identifier: Apache-2.0
#include "indsel/stats.hpp"

#include <algorithm>
#include <cmath>

#include "indsel/errors.hpp"
#include "indsel/special.hpp"

namespace indsel {

const char* to_string(TestFamily f) {
  switch (f) {
    case TestFamily::kMannWhitneyU: return "u";
    case TestFamily::kKolmogorovSmirnov: return "ks";
    case TestFamily::kFVariance: return "f";
  }
  return "?";
}

TestFamily family_from_string(const std::string& name) {
  if (name == "u" || name == "mann_whitney_u") return TestFamily::kMannWhitneyU;
  if (name == "ks" || name == "kolmogorov_smirnov") return TestFamily::kKolmogorovSmirnov;
  if (name == "f" || name == "f_variance") return TestFamily::kFVariance;
  throw ConfigError("unknown test family: " + name);
}

void ScoreSpec::validate() const {
  if (window_size < 4 || window_size % 2 != 0)
    throw ConfigError("window_size must be even and >= 4, got " + std::to_string(window_size));
  if (!(break_point_fraction > 0.0 && break_point_fraction < 1.0))
    throw ConfigError("break_point_fraction must lie in (0,1)");
}

namespace {

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

void require_min_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw ConfigError("two-sample test needs at least 2 points per sample");
}

// Sample variance (ddof = 1), two-pass.
double sample_variance(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

namespace detail {

double u_pvalue_sorted(std::span<const double> a, std::span<const double> b) {
  const std::size_t na = a.size(), nb = b.size();
  const double n = static_cast<double>(na + nb);
  std::size_t i = 0, j = 0, pos = 0;
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  while (i < na || j < nb) {
    const double v = (j >= nb || (i < na && a[i] <= b[j])) ? a[i] : b[j];
    std::size_t ca = 0, cb = 0;
    while (i < na && a[i] == v) { ++i; ++ca; }
    while (j < nb && b[j] == v) { ++j; ++cb; }
    const double g = static_cast<double>(ca + cb);
    const double avg_rank = static_cast<double>(pos) + (g + 1.0) / 2.0;
    rank_sum_a += static_cast<double>(ca) * avg_rank;
    tie_term += g * g * g - g;
    pos += ca + cb;
  }
  const double u1 = rank_sum_a - 0.5 * static_cast<double>(na) * (static_cast<double>(na) + 1.0);
  const double mu = 0.5 * static_cast<double>(na) * static_cast<double>(nb);
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;  // every value tied across both samples
  double z = (std::fabs(u1 - mu) - 0.5) / std::sqrt(var);
  if (z < 0.0) z = 0.0;
  return clamp01(std::erfc(z / 1.4142135623730950488));
}

double ks_pvalue_sorted(std::span<const double> a, std::span<const double> b) {
  const std::size_t na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < na || j < nb) {
    const double v = (j >= nb || (i < na && a[i] <= b[j])) ? a[i] : b[j];
    while (i < na && a[i] == v) ++i;
    while (j < nb && b[j] == v) ++j;
    const double diff = std::fabs(static_cast<double>(i) / static_cast<double>(na) -
                                  static_cast<double>(j) / static_cast<double>(nb));
    if (diff > d) d = diff;
  }
  const double ne = static_cast<double>(na) * static_cast<double>(nb) /
                    static_cast<double>(na + nb);
  return clamp01(kolmogorov_sf(std::sqrt(ne) * d));
}

double f_pvalue(std::span<const double> a, std::span<const double> b) {
  double va = sample_variance(a);
  double vb = sample_variance(b);
  if (va <= 0.0 || vb <= 0.0) return 1.0;  // degenerate window: non-rejection
  double da = static_cast<double>(a.size() - 1);
  double db = static_cast<double>(b.size() - 1);
  // Canonical orientation (larger variance, then larger df, on top) makes the
  // result bit-identical under argument swap.
  if (va < vb || (va == vb && da < db)) {
    std::swap(va, vb);
    std::swap(da, db);
  }
  const double f = va / vb;
  const double x = da * f / (da * f + db);
  const double cdf = reg_inc_beta(da / 2.0, db / 2.0, x);
  return clamp01(2.0 * std::min(cdf, 1.0 - cdf));
}

}  // namespace detail

PValue mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  require_min_size(a, b);
  std::vector<double> as(a.begin(), a.end()), bs(b.begin(), b.end());
  std::sort(as.begin(), as.end());
  std::sort(bs.begin(), bs.end());
  return PValue{detail::u_pvalue_sorted(as, bs)};
}

PValue ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_min_size(a, b);
  std::vector<double> as(a.begin(), a.end()), bs(b.begin(), b.end());
  std::sort(as.begin(), as.end());
  std::sort(bs.begin(), bs.end());
  return PValue{detail::ks_pvalue_sorted(as, bs)};
}

PValue f_test_variance(std::span<const double> a, std::span<const double> b) {
  require_min_size(a, b);
  return PValue{detail::f_pvalue(a, b)};
}

namespace {

// Sorted half-window maintained under stride-1 slides. Erase + insert are
// O(w) memmoves, cheaper than re-sorting for the window sizes used here.
class SlidingSorted {
 public:
  void init(std::span<const double> xs) {
    buf_.assign(xs.begin(), xs.end());
    std::sort(buf_.begin(), buf_.end());
  }
  void slide(double out, double in) {
    auto it = std::lower_bound(buf_.begin(), buf_.end(), out);
    buf_.erase(it);
    buf_.insert(std::upper_bound(buf_.begin(), buf_.end(), in), in);
  }
  std::span<const double> view() const { return buf_; }

 private:
  std::vector<double> buf_;
};

}  // namespace

void sweep_pvalues_multi(std::span<const double> values, int w,
                         const std::array<bool, kNumFamilies>& want,
                         std::array<std::vector<double>, kNumFamilies>& out) {
  for (auto& v : out) v.clear();
  const int len = static_cast<int>(values.size());
  if (len < w) return;
  const int half = w / 2;
  const int npos = len - w + 1;
  for (int f = 0; f < kNumFamilies; ++f)
    if (want[f]) out[f].resize(npos);

  SlidingSorted left, right;
  left.init(values.subspan(0, half));
  right.init(values.subspan(half, half));
  for (int j = 0; j < npos; ++j) {
    if (want[0]) out[0][j] = detail::u_pvalue_sorted(left.view(), right.view());
    if (want[1]) out[1][j] = detail::ks_pvalue_sorted(left.view(), right.view());
    if (want[2]) out[2][j] = detail::f_pvalue(left.view(), right.view());
    if (j + 1 < npos) {
      left.slide(values[j], values[j + half]);
      right.slide(values[j + half], values[j + w]);
    }
  }
}

std::vector<double> sweep_pvalues(std::span<const double> values, TestFamily family, int w) {
  std::array<bool, kNumFamilies> want{};
  want[static_cast<int>(family)] = true;
  std::array<std::vector<double>, kNumFamilies> out;
  sweep_pvalues_multi(values, w, want, out);
  return std::move(out[static_cast<int>(family)]);
}

double collapse_sweep(std::span<const double> sweep, int w, bool confirmation) {
  const int half = w / 2;
  const int npos = static_cast<int>(sweep.size());
  double best = 1.0;
  if (!confirmation) {
    for (int j = 0; j < npos; ++j) best = std::min(best, sweep[j]);
    return best;
  }
  for (int j = 0; j + half < npos; ++j)
    best = std::min(best, std::max(sweep[j], sweep[j + half]));
  return best;
}

PValue apply_score(const TimeSeries& series, const ScoreSpec& spec) {
  spec.validate();
  const auto sweep = sweep_pvalues(series.values, spec.family, spec.window_size);
  return PValue{collapse_sweep(sweep, spec.window_size, spec.confirmation)};
}

}  // namespace indsel
