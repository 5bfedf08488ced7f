#include "driftstream/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "driftstream/error.hpp"
#include "driftstream/scaler.hpp"

namespace driftstream {

MetricSet metrics_from_counts(const ConfusionCounts& c) {
  MetricSet m;
  double total = static_cast<double>(c.total());
  if (total <= 0.0) return m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / total;
  m.precision = c.tp + c.fp > 0
                    ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                    : 0.0;
  m.recall = c.tp + c.fn > 0
                 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                 : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

std::optional<double> auc(std::span<const std::pair<double, bool>> scored) {
  std::uint64_t positives = 0;
  for (const auto& [score, truth] : scored)
    if (truth) ++positives;
  std::uint64_t negatives = scored.size() - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  // Rank-sum with average ranks on ties.
  std::vector<std::pair<double, bool>> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (sorted[k].second) positive_rank_sum += avg_rank;
    i = j;
  }
  double np = static_cast<double>(positives);
  double nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double throughput_mbps(std::uint64_t bytes_processed, double wall_seconds) {
  if (wall_seconds <= 0.0) return 0.0;
  return (static_cast<double>(bytes_processed) * 8.0 / 1e6) / wall_seconds;
}

RunResult prequential_run(Learner& learner,
                          std::span<const FeatureVector> stream,
                          const DriftSchedule& schedule,
                          const RunOptions& options) {
  (void)schedule;  // boundaries only annotate the persisted trace
  if (stream.empty()) throw EmptyStream("prequential run over empty stream");

  RunResult result;
  result.f1_trace.reserve(stream.size());
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(stream.size());
  OnlineMinMaxScaler scaler;
  std::uint64_t drift_seen = learner.drift_events();

  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const FeatureVector& raw = stream[i];
    FeatureVector sample = options.scale ? scaler.transform(raw) : raw;
    Label truth = raw.label;

    Prediction p = learner.predict(sample);
    scored.emplace_back(p.score, truth == Label::malicious);
    result.counts.add(p.label, truth);
    result.f1_trace.push_back(metrics_from_counts(result.counts).f1);
    result.bytes_processed += raw.byte_count;

    if (options.train) {
      learner.learn(sample, truth);
      std::uint64_t now = learner.drift_events();
      if (now != drift_seen) {
        result.drift_samples.push_back(i);
        drift_seen = now;
      }
    }
  }
  result.finals = metrics_from_counts(result.counts);
  result.auc = auc(scored);

  // Final metric computation counts as pipeline time.
  auto end = std::chrono::steady_clock::now();
  result.wall_seconds = std::chrono::duration<double>(end - start).count();
  result.bandwidth_mbps =
      throughput_mbps(result.bytes_processed, result.wall_seconds);
  return result;
}

RunResult batch_reference_run(std::span<const FeatureVector> stream,
                              const DriftSchedule& schedule,
                              const BatchForestConfig& config,
                              const RunOptions& options) {
  if (stream.empty()) throw EmptyStream("batch reference over empty stream");

  std::size_t phase1_end = static_cast<std::size_t>(
      std::min<std::uint64_t>(schedule.boundaries[0], stream.size()));
  std::span<const FeatureVector> phase1 = stream.subspan(0, phase1_end);

  // When scaling, fit the scaler over phase 1 exactly as the streaming
  // loop would see it, so train and evaluation inputs agree.
  std::vector<FeatureVector> scaled_phase1;
  if (options.scale) {
    OnlineMinMaxScaler scaler;
    scaled_phase1.reserve(phase1.size());
    for (const auto& v : phase1) scaled_phase1.push_back(scaler.transform(v));
    phase1 = scaled_phase1;
  }

  std::size_t train_count = phase1.size() * 8 / 10;
  if (train_count < 2) train_count = phase1.size();
  BatchForest forest = batch_train(phase1.subspan(0, train_count), config);

  std::optional<MetricSet> validation;
  if (train_count < phase1.size()) {
    ConfusionCounts holdout;
    for (const FeatureVector& v : phase1.subspan(train_count))
      holdout.add(forest.predict(v).label, v.label);
    validation = metrics_from_counts(holdout);
  }

  RunOptions frozen = options;
  frozen.train = false;
  RunResult result = prequential_run(forest, stream, schedule, frozen);
  result.validation = validation;
  return result;
}

AggregateResult aggregate(const std::vector<RunResult>& results) {
  if (results.size() < 2)
    throw TooFewRuns("aggregate needs at least 2 runs, got " +
                     std::to_string(results.size()));

  AggregateResult out;
  auto stats_over = [&](auto&& get) {
    AggregateStats s;
    double n = static_cast<double>(results.size());
    for (const RunResult& r : results) s.mean += get(r);
    s.mean /= n;
    double ss = 0.0;
    for (const RunResult& r : results) {
      double d = get(r) - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / (n - 1.0));
    return s;
  };

  out.metrics["f1"] = stats_over([](const RunResult& r) { return r.finals.f1; });
  out.metrics["accuracy"] =
      stats_over([](const RunResult& r) { return r.finals.accuracy; });
  out.metrics["precision"] =
      stats_over([](const RunResult& r) { return r.finals.precision; });
  out.metrics["recall"] =
      stats_over([](const RunResult& r) { return r.finals.recall; });
  out.metrics["auc"] =
      stats_over([](const RunResult& r) { return r.auc.value_or(0.0); });
  out.metrics["bandwidth_mbps"] =
      stats_over([](const RunResult& r) { return r.bandwidth_mbps; });

  out.best_run = 0;
  out.worst_run = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].finals.f1 > results[out.best_run].finals.f1) out.best_run = i;
    if (results[i].finals.f1 < results[out.worst_run].finals.f1)
      out.worst_run = i;
  }
  return out;
}

namespace {

nlohmann::json metric_set_to_json(const MetricSet& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1}};
}

}  // namespace

std::string run_result_to_json(const RunResult& result,
                               const std::string& learner_name,
                               const std::string& config_echo,
                               const DriftSchedule& schedule) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["learner"] = learner_name;
  j["config"] = config_echo;
  j["samples"] = result.counts.total();
  j["boundaries"] = result.counts.total() > 0
                        ? nlohmann::json(schedule.boundaries)
                        : nlohmann::json(nullptr);
  j["final_metrics"] = metric_set_to_json(result.finals);
  if (result.auc) j["final_metrics"]["auc"] = *result.auc;
  j["confusion"] = {{"tp", result.counts.tp},
                    {"fp", result.counts.fp},
                    {"tn", result.counts.tn},
                    {"fn", result.counts.fn}};
  j["drift_events"] = result.drift_samples;
  j["bytes_processed"] = result.bytes_processed;
  if (result.validation)
    j["validation"] = metric_set_to_json(*result.validation);
  j["timing"] = {{"wall_seconds", result.wall_seconds},
                 {"bandwidth_mbps", result.bandwidth_mbps}};
  return j.dump(2) + "\n";
}

std::string aggregate_to_json(const AggregateResult& aggregate,
                              const std::string& learner_name,
                              const std::string& config_echo) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["learner"] = learner_name;
  j["config"] = config_echo;
  nlohmann::json metrics;
  for (const auto& [name, stats] : aggregate.metrics) {
    if (name == "bandwidth_mbps") continue;  // timing-derived
    metrics[name] = {{"mean", stats.mean}, {"stddev", stats.stddev}};
  }
  j["metrics"] = metrics;
  j["best_run"] = aggregate.best_run;
  j["worst_run"] = aggregate.worst_run;
  const auto& bw = aggregate.metrics.at("bandwidth_mbps");
  j["timing"] = {
      {"bandwidth_mbps", {{"mean", bw.mean}, {"stddev", bw.stddev}}}};
  return j.dump(2) + "\n";
}

void write_trace_csv(const std::filesystem::path& path, const RunResult& result,
                     const DriftSchedule& schedule) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace CSV: " + path.string());
  out << "sample_index,cumulative_f1,phase\n";
  for (std::size_t i = 0; i < result.f1_trace.size(); ++i) {
    out << i << ',' << result.f1_trace[i] << ',' << schedule.phase_of(i)
        << '\n';
  }
}

}  // namespace driftstream
