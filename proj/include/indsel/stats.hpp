// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indsel/datagen.hpp"

namespace indsel {

enum class TestFamily : std::uint8_t {
  kMannWhitneyU = 0,
  kKolmogorovSmirnov = 1,
  kFVariance = 2,
};
inline constexpr int kNumFamilies = 3;

const char* to_string(TestFamily f);
TestFamily family_from_string(const std::string& name);

// Two-sided p-value in [0, 1].
struct PValue {
  double value = 1.0;
};

// Identity of one parametric score: which two-sample test, how wide the split
// window is, and whether an adjacent window has to agree (confirmation).
// Scores are evaluated by sweeping the break point over every feasible
// position and keeping the smallest p-value, so (family, window, confirmation)
// is the whole identity; break_point_fraction records where a pinned break
// point would sit and does not participate in the sweep.
struct ScoreSpec {
  TestFamily family = TestFamily::kMannWhitneyU;
  int window_size = 20;                // even, >= 4
  double break_point_fraction = 0.5;   // in (0, 1)
  bool confirmation = false;

  void validate() const;  // throws ConfigError

  friend bool operator==(const ScoreSpec&, const ScoreSpec&) = default;
};

// Mann-Whitney U, two-sided, normal approximation with tie correction and
// continuity correction. Requires |a|, |b| >= 2. Symmetric in (a, b).
PValue mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Two-sample Kolmogorov-Smirnov, two-sided, asymptotic Kolmogorov
// distribution at sqrt(ne) * D with ne = |a||b| / (|a|+|b|).
PValue ks_two_sample(std::span<const double> a, std::span<const double> b);

// F test on the sample-variance ratio, two-sided via the regularized
// incomplete beta function. Exactly invariant under swapping (a, b); returns
// p = 1 when either sample has zero variance (non-rejection on degenerate
// windows).
PValue f_test_variance(std::span<const double> a, std::span<const double> b);

// p-values for every feasible break point t_b (stride 1). Entry j corresponds
// to t_b = j + w/2, populations values[t_b-w/2, t_b) and values[t_b, t_b+w/2).
// Empty when the series is shorter than w. Maintains the two half-windows as
// sliding sorted arrays; `want` selects which families are evaluated so one
// pass over the series serves several scores.
void sweep_pvalues_multi(std::span<const double> values, int w,
                         const std::array<bool, kNumFamilies>& want,
                         std::array<std::vector<double>, kNumFamilies>& out);

std::vector<double> sweep_pvalues(std::span<const double> values, TestFamily family, int w);

// Collapses a sweep to the score scalar: min p over positions, or, with
// confirmation, min over positions of max(p[j], p[j + w/2]) so both adjacent
// windows must reject. Returns 1.0 when no position is feasible.
double collapse_sweep(std::span<const double> sweep, int w, bool confirmation);

// The score of one series: sweep + collapse. Series too short for the window
// (plus the extra half-window under confirmation) score 1.0.
PValue apply_score(const TimeSeries& series, const ScoreSpec& spec);

namespace detail {
// Per-position kernels on individually sorted samples; used by both the
// sliding sweep and the public entry points.
double u_pvalue_sorted(std::span<const double> a, std::span<const double> b);
double ks_pvalue_sorted(std::span<const double> a, std::span<const double> b);
double f_pvalue(std::span<const double> a, std::span<const double> b);
}  // namespace detail

}  // namespace indsel
