// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indsel/nbc.hpp"

namespace indsel {

// Quality measures guiding wrapper searches. All are minimized: the log
// conditional likelihood (higher is better) enters negated.
enum class Measure : std::uint8_t {
  kClassificationError = 0,
  kErrorProbability = 1,
  kLogConditionalLikelihood = 2,
};
const char* to_string(Measure m);
Measure measure_from_string(const std::string& name);

// Oriented value of the current cache subset (lower is better).
double measure_value(const JointCache& cache, std::span<const ClassLabel> labels, Measure m);

enum class MoveAction : std::uint8_t { kAdd = 0, kRemove = 1 };

struct TraceStep {
  MoveAction action;
  std::size_t feature;
  double measure;           // oriented measure of the subset after the move
  std::size_t subset_size;  // after the move
};

// Ordered record of every subset a search visited. Replaying `steps` from
// `initial` reproduces each snapshot.
struct SelectionTrace {
  std::string method;
  Measure measure = Measure::kClassificationError;
  std::size_t universe = 0;
  std::vector<std::size_t> initial;
  std::vector<TraceStep> steps;
};

// Filter output: features in selection order with their criterion values.
struct Ranking {
  std::string method;
  std::vector<std::size_t> order;
  std::vector<double> criterion;
};

// Plug-in mutual information I(column; label) in nats from empirical counts.
double mutual_information(const BitMatrix& bits, std::size_t column,
                          std::span<const ClassLabel> labels, int class_count);

// All features by descending I(B^p; Y), ties by ascending index. O(N P).
Ranking mi_rank(const BinaryDataset& data);

// Greedy mRMR, difference (MID) form: the next feature maximizes
// I(B^p; Y) - (1/|S|) sum_{j in S} I(B^p; B^j). O(N P limit).
Ranking mrmr_rank(const BinaryDataset& data, std::size_t limit);

// Greedy wrapper searches over a JointCache built for `model` on `data`.
// Candidate moves are scored against a frozen cache (parallel over
// candidates, deterministic (value, index) tie-break); searches run to
// exhaustion and leave the stopping decision to validation.
SelectionTrace forward_search(const BinaryDataset& data, const NBCModel& model, Measure m,
                              std::size_t cap);
SelectionTrace backward_search(const BinaryDataset& data, const NBCModel& model, Measure m);

enum class FloatStart : std::uint8_t { kForward = 0, kBackward = 1 };

// Alternating greedy phases; a phase keeps moving while the best move
// improves the measure by more than 1e-12, and the search stops when two
// consecutive phases make no move. A 10 P move budget guards against cycling.
SelectionTrace floating_search(const BinaryDataset& data, const NBCModel& model, Measure m,
                               FloatStart start);

struct SubsetChoice {
  FeatureSubset subset;
  std::size_t position = 0;  // snapshot index in the trace / prefix length
  double validation_error = 1.0;
};

// The smallest subset among those minimizing classification error on the
// validation set (model fit on the training half); ties at equal size go to
// the earliest snapshot. Rankings are scored prefix by prefix.
SubsetChoice select_best_subset(const SelectionTrace& trace, const NBCModel& model,
                                const BinaryDataset& validation);
SubsetChoice select_best_subset(const Ranking& ranking, const NBCModel& model,
                                const BinaryDataset& validation);

// JSON-lines round trip: one step per line (action, feature, measure, size).
void write_trace_jsonl(const SelectionTrace& trace, const std::string& path);
SelectionTrace read_trace_jsonl(const std::string& path);
void write_ranking_jsonl(const Ranking& ranking, const std::string& path);

}  // namespace indsel
