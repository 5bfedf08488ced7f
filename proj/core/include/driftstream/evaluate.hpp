#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftstream/batch_forest.hpp"
#include "driftstream/learner.hpp"
#include "driftstream/synth.hpp"

namespace driftstream {

/// Confusion counts with malicious as the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(Label predicted, Label truth) {
    if (truth == Label::malicious)
      predicted == Label::malicious ? ++tp : ++fn;
    else
      predicted == Label::malicious ? ++fp : ++tn;
  }
};

struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Standard definitions; zero-denominator cases return 0.
MetricSet metrics_from_counts(const ConfusionCounts& counts);

/// Mann-Whitney rank AUC: P(score_pos > score_neg) + 0.5 * P(tie).
/// Absent when the run contains a single class.
std::optional<double> auc(std::span<const std::pair<double, bool>> scored);

/// (bytes * 8 / 1e6) / seconds.
double throughput_mbps(std::uint64_t bytes_processed, double wall_seconds);

struct RunResult {
  std::vector<double> f1_trace;  // cumulative F1 after every sample
  MetricSet finals;
  std::optional<double> auc;
  ConfusionCounts counts;
  std::vector<std::uint64_t> drift_samples;
  double wall_seconds = 0.0;
  std::uint64_t bytes_processed = 0;
  double bandwidth_mbps = 0.0;
  std::optional<MetricSet> validation;  // batch reference: phase-1 holdout
};

struct RunOptions {
  bool train = true;   // disable to evaluate a frozen model
  bool scale = false;  // apply the online min-max scaler in the loop
};

/// Test-then-train pass over the stream: every sample is predicted first,
/// folded into cumulative metrics, then learned.
RunResult prequential_run(Learner& learner,
                          std::span<const FeatureVector> stream,
                          const DriftSchedule& schedule,
                          const RunOptions& options = {});

/// Trains a batch forest on the first phase (80/20 train/validation split)
/// and evaluates the whole stream with the frozen model under the same
/// per-sample recording.
RunResult batch_reference_run(std::span<const FeatureVector> stream,
                              const DriftSchedule& schedule,
                              const BatchForestConfig& config,
                              const RunOptions& options = {});

struct AggregateStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1)
};

struct AggregateResult {
  std::map<std::string, AggregateStats> metrics;
  std::size_t best_run = 0;   // by final F1
  std::size_t worst_run = 0;
};

/// Mean and sample standard deviation per metric over >= 2 runs.
AggregateResult aggregate(const std::vector<RunResult>& results);

// Persistence: JSON summary (timing fields isolated under "timing" so
// deterministic comparisons can drop them) and the trace CSV
// `sample_index,cumulative_f1,phase`.
std::string run_result_to_json(const RunResult& result,
                               const std::string& learner_name,
                               const std::string& config_echo,
                               const DriftSchedule& schedule);
std::string aggregate_to_json(const AggregateResult& aggregate,
                              const std::string& learner_name,
                              const std::string& config_echo);
void write_trace_csv(const std::filesystem::path& path, const RunResult& result,
                     const DriftSchedule& schedule);

}  // namespace driftstream
