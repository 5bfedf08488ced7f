// Command-line front end: ingestion -> features -> synthesis -> evaluation.
//
// Exit codes: 0 ok, 1 usage, 2 ingest error, 3 synthesis error,
// 4 evaluation error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "driftstream/adaptive_forest.hpp"
#include "driftstream/batch_forest.hpp"
#include "driftstream/error.hpp"
#include "driftstream/evaluate.hpp"
#include "driftstream/features.hpp"
#include "driftstream/hoeffding_tree.hpp"
#include "driftstream/naive_bayes.hpp"
#include "driftstream/packet_csv.hpp"
#include "driftstream/pcap.hpp"
#include "driftstream/rng.hpp"
#include "driftstream/synth.hpp"

namespace fs = std::filesystem;
using namespace driftstream;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIngest = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitEvaluation = 4;

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------- extract

int cmd_extract(const std::string& in_path, const std::string& out_path) {
  try {
    std::vector<PacketRecord> packets;
    IngestStats stats;
    fs::path in(in_path);
    std::string ext = in.extension().string();
    if (ext == ".pcap" || ext == ".cap") {
      packets = read_pcap(in, &stats);
    } else if (ext == ".csv") {
      packets = read_packet_csv(in);
      stats.packets_emitted = packets.size();
    } else {
      std::cerr << "extract: unsupported input extension '" << ext << "'\n";
      return kExitUsage;
    }

    auto features = extract_features(packets);
    write_feature_csv(fs::path(out_path), features);
    std::cout << "packets read: " << stats.packets_emitted
              << ", skipped: " << stats.total_skipped()
              << " (non-ipv4 " << stats.skipped_non_ipv4 << ", non-transport "
              << stats.skipped_non_transport << ", malformed "
              << stats.skipped_malformed << ")\n"
              << "windows emitted: " << features.size() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "extract: " << e.what() << "\n";
    return kExitIngest;
  }
}

// ------------------------------------------------------------------ synth

PoolMap load_pool_dir(const fs::path& dir, const StreamSpec& spec) {
  PoolMap pools;
  for (const PhaseSpec& phase : spec.phases) {
    if (pools.count(phase.pool_id)) continue;
    fs::path file = dir / (phase.pool_id + ".csv");
    auto rows = read_feature_csv(file);
    LabeledPool pool;
    for (auto& row : rows) {
      (row.label == Label::malicious ? pool.malicious : pool.benign)
          .push_back(std::move(row));
    }
    pools[phase.pool_id] = std::move(pool);
  }
  return pools;
}

int cmd_synth(const std::string& spec_path, const std::string& pools_dir,
              bool synthetic, std::uint64_t pool_seed,
              const std::string& out_path) {
  try {
    StreamSpec spec = read_stream_spec(fs::path(spec_path));
    PoolMap pools = synthetic ? gen_pools_for_spec(spec, pool_seed)
                              : load_pool_dir(fs::path(pools_dir), spec);
    BuiltStream built = build_stream(spec, pools);

    std::ostringstream csv;
    write_feature_csv(csv, built.samples);
    atomic_write(fs::path(out_path), csv.str());
    write_boundaries(fs::path(out_path + ".boundaries"), built.schedule);

    std::cout << "stream: " << built.samples.size() << " samples, boundaries "
              << built.schedule.boundaries[0] << ","
              << built.schedule.boundaries[1] << ","
              << built.schedule.boundaries[2] << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "synth: " << e.what() << "\n";
    return kExitSynthesis;
  }
}

// -------------------------------------------------------------------- run

struct ExperimentConfig {
  std::string learner = "arf";  // nb | hat | arf | batch-rf
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  bool aggregate_runs = true;
  bool scale = false;

  // Stream source: prebuilt stream CSV + boundaries, or spec (+ pools dir
  // or synthetic pools).
  std::string stream_path;
  std::string boundaries_path;
  std::string spec_path;
  std::string pools_dir;
  bool synthetic = false;

  // Hyper-parameters (defaults match the learner structs).
  std::size_t arf_trees = 10;
  double lambda = 6.0;
  std::size_t feature_subset = 5;
  double grace_period = 200.0;
  double split_confidence = 1e-7;
  double tie_threshold = 0.05;
  double warning_delta = 0.01;
  double drift_delta = 0.002;
  std::size_t batch_trees = 100;
};

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw Error("expected boolean, got '" + value + "'");
}

ExperimentConfig read_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(line_no) +
                  ": expected key = value");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "learner") cfg.learner = value;
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "reps") cfg.reps = std::stoull(value);
      else if (key == "aggregate") cfg.aggregate_runs = parse_bool(value);
      else if (key == "scale") cfg.scale = parse_bool(value);
      else if (key == "stream") cfg.stream_path = value;
      else if (key == "boundaries") cfg.boundaries_path = value;
      else if (key == "spec") cfg.spec_path = value;
      else if (key == "pools") cfg.pools_dir = value;
      else if (key == "synthetic") cfg.synthetic = parse_bool(value);
      else if (key == "arf_trees") cfg.arf_trees = std::stoull(value);
      else if (key == "lambda") cfg.lambda = std::stod(value);
      else if (key == "feature_subset") cfg.feature_subset = std::stoull(value);
      else if (key == "grace_period") cfg.grace_period = std::stod(value);
      else if (key == "split_confidence") cfg.split_confidence = std::stod(value);
      else if (key == "tie_threshold") cfg.tie_threshold = std::stod(value);
      else if (key == "warning_delta") cfg.warning_delta = std::stod(value);
      else if (key == "drift_delta") cfg.drift_delta = std::stod(value);
      else if (key == "batch_trees") cfg.batch_trees = std::stoull(value);
      else throw Error("unknown config key '" + key + "'");
    } catch (const std::exception& e) {
      throw Error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (cfg.learner != "nb" && cfg.learner != "hat" && cfg.learner != "arf" &&
      cfg.learner != "batch-rf")
    throw Error("learner must be one of nb, hat, arf, batch-rf");
  if (cfg.reps < 1) throw Error("reps must be >= 1");
  bool has_stream = !cfg.stream_path.empty();
  bool has_spec = !cfg.spec_path.empty();
  if (has_stream == has_spec)
    throw Error("config needs exactly one of 'stream' or 'spec'");
  if (has_stream && cfg.boundaries_path.empty())
    throw Error("'stream' requires 'boundaries'");
  if (has_spec && !cfg.synthetic && cfg.pools_dir.empty())
    throw Error("'spec' requires 'pools' or synthetic = true");
  return cfg;
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "learner=" << cfg.learner << ";seed=" << cfg.seed
      << ";reps=" << cfg.reps << ";scale=" << (cfg.scale ? "on" : "off");
  if (!cfg.stream_path.empty())
    out << ";stream=" << fs::path(cfg.stream_path).filename().string();
  if (!cfg.spec_path.empty())
    out << ";spec=" << fs::path(cfg.spec_path).filename().string()
        << ";pools=" << (cfg.synthetic ? "synthetic" : cfg.pools_dir);
  if (cfg.learner == "arf")
    out << ";trees=" << cfg.arf_trees << ";lambda=" << cfg.lambda
        << ";m=" << cfg.feature_subset;
  if (cfg.learner == "batch-rf") out << ";trees=" << cfg.batch_trees;
  return out.str();
}

std::unique_ptr<Learner> make_streaming_learner(const ExperimentConfig& cfg,
                                                std::uint64_t seed) {
  if (cfg.learner == "nb") return std::make_unique<GaussianNaiveBayes>();
  if (cfg.learner == "hat") {
    HoeffdingTreeConfig tc;
    tc.grace_period = cfg.grace_period;
    tc.split_confidence = cfg.split_confidence;
    tc.tie_threshold = cfg.tie_threshold;
    tc.adaptive = true;
    tc.seed = seed;
    return std::make_unique<HoeffdingTree>(tc);
  }
  ArfConfig ac;
  ac.tree_count = cfg.arf_trees;
  ac.lambda = cfg.lambda;
  ac.feature_subset = cfg.feature_subset;
  ac.warning_delta = cfg.warning_delta;
  ac.drift_delta = cfg.drift_delta;
  ac.grace_period = cfg.grace_period;
  ac.split_confidence = cfg.split_confidence;
  ac.tie_threshold = cfg.tie_threshold;
  ac.seed = seed;
  return std::make_unique<AdaptiveRandomForest>(ac);
}

std::size_t worker_count(std::size_t reps) {
  const char* env = std::getenv("DRIFTSTREAM_WORKERS");
  std::size_t workers = 1;
  if (env && *env) {
    workers = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    if (workers == 0) workers = 1;
  }
  return std::min(workers, reps);
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override,
            std::optional<std::size_t> reps_override) {
  ExperimentConfig cfg;
  try {
    cfg = read_experiment_config(fs::path(config_path));
  } catch (const Error& e) {
    std::cerr << "run: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed_override) cfg.seed = *seed_override;
  if (reps_override) cfg.reps = *reps_override;

  try {
    if (cfg.reps < 2 && cfg.aggregate_runs)
      throw TooFewRuns("aggregate requested but reps = " +
                       std::to_string(cfg.reps) +
                       " (set aggregate = false for single runs)");

    fs::create_directories(out_dir);

    // Shared inputs loaded once.
    std::optional<BuiltStream> fixed_stream;
    std::optional<StreamSpec> spec;
    PoolMap file_pools;
    if (!cfg.stream_path.empty()) {
      BuiltStream s;
      s.samples = read_feature_csv(fs::path(cfg.stream_path));
      s.schedule = read_boundaries(fs::path(cfg.boundaries_path));
      fixed_stream = std::move(s);
    } else {
      spec = read_stream_spec(fs::path(cfg.spec_path));
      if (!cfg.synthetic) file_pools = load_pool_dir(fs::path(cfg.pools_dir), *spec);
    }

    std::string echo = config_echo(cfg);
    std::vector<RunResult> results(cfg.reps);
    std::vector<DriftSchedule> schedules(cfg.reps);
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::atomic<std::size_t> next_rep{0};

    auto run_one = [&](std::size_t rep) {
      std::uint64_t rep_seed = derive_seed(cfg.seed, rep);

      const BuiltStream* stream = nullptr;
      BuiltStream rebuilt;
      if (fixed_stream) {
        stream = &*fixed_stream;
      } else {
        StreamSpec rep_spec = *spec;
        rep_spec.shuffle_seed = derive_seed(rep_seed, 0x5151);
        if (cfg.synthetic) {
          PoolMap pools = gen_pools_for_spec(*spec, derive_seed(rep_seed, 0x9001));
          rebuilt = build_stream(rep_spec, pools);
        } else {
          rebuilt = build_stream(rep_spec, file_pools);
        }
        stream = &rebuilt;
      }
      schedules[rep] = stream->schedule;

      RunOptions options;
      options.scale = cfg.scale;
      if (cfg.learner == "batch-rf") {
        BatchForestConfig bc;
        bc.tree_count = cfg.batch_trees;
        bc.feature_subset = cfg.feature_subset;
        bc.seed = rep_seed;
        results[rep] =
            batch_reference_run(stream->samples, stream->schedule, bc, options);
      } else {
        auto learner = make_streaming_learner(cfg, rep_seed);
        results[rep] =
            prequential_run(*learner, stream->samples, stream->schedule, options);
      }

      std::string run_json = run_result_to_json(results[rep], cfg.learner, echo,
                                                stream->schedule);
      atomic_write(fs::path(out_dir) / ("run_" + std::to_string(rep) + ".json"),
                   run_json);
      std::ostringstream trace;
      trace << "sample_index,cumulative_f1,phase\n";
      for (std::size_t i = 0; i < results[rep].f1_trace.size(); ++i)
        trace << i << ',' << results[rep].f1_trace[i] << ','
              << stream->schedule.phase_of(i) << '\n';
      atomic_write(fs::path(out_dir) / ("trace_" + std::to_string(rep) + ".csv"),
                   trace.str());
    };

    std::size_t workers = worker_count(cfg.reps);
    if (workers <= 1) {
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) run_one(rep);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (;;) {
            std::size_t rep = next_rep.fetch_add(1);
            if (rep >= cfg.reps) return;
            try {
              run_one(rep);
            } catch (...) {
              std::lock_guard<std::mutex> lock(error_mutex);
              if (!first_error) first_error = std::current_exception();
              return;
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      if (first_error) std::rethrow_exception(first_error);
    }

    if (cfg.aggregate_runs) {
      AggregateResult agg = aggregate(results);
      atomic_write(fs::path(out_dir) / "aggregate.json",
                   aggregate_to_json(agg, cfg.learner, echo));
    }

    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      std::cout << "run " << rep << ": f1=" << results[rep].finals.f1
                << " accuracy=" << results[rep].finals.accuracy
                << " drift_events=" << results[rep].drift_samples.size()
                << " bandwidth=" << results[rep].bandwidth_mbps << " Mbps\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "run: " << e.what() << "\n";
    return kExitEvaluation;
  }
}

// ----------------------------------------------------------------- report

int cmd_report(const std::vector<std::string>& files) {
  try {
    struct Row {
      std::string learner;
      std::map<std::string, std::pair<double, std::optional<double>>> metrics;
      double mbps_mean = 0.0;
      std::optional<double> mbps_std;
    };
    std::vector<Row> rows;
    std::optional<int> version;

    for (const auto& file : files) {
      std::ifstream in(file);
      if (!in) throw Error("cannot open " + file);
      nlohmann::json j = nlohmann::json::parse(in);
      int v = j.at("format_version").get<int>();
      if (version && *version != v)
        throw Error("mixed format versions: found " + std::to_string(v) +
                    " and " + std::to_string(*version));
      version = v;
      if (v != 1) throw Error("unsupported format version " + std::to_string(v));

      Row row;
      row.learner = j.at("learner").get<std::string>();
      if (j.contains("metrics")) {  // aggregate file
        for (const auto& [name, stats] : j.at("metrics").items())
          row.metrics[name] = {stats.at("mean").get<double>(),
                               stats.at("stddev").get<double>()};
        row.mbps_mean =
            j.at("timing").at("bandwidth_mbps").at("mean").get<double>();
        row.mbps_std =
            j.at("timing").at("bandwidth_mbps").at("stddev").get<double>();
      } else {  // single-run file
        for (const auto& [name, value] : j.at("final_metrics").items())
          row.metrics[name] = {value.get<double>(), std::nullopt};
        row.mbps_mean = j.at("timing").at("bandwidth_mbps").get<double>();
      }
      rows.push_back(std::move(row));
    }

    auto cell = [](std::pair<double, std::optional<double>> v) {
      char buf[64];
      if (v.second)
        std::snprintf(buf, sizeof(buf), "%.3f +- %.3f", v.first, *v.second);
      else
        std::snprintf(buf, sizeof(buf), "%.3f", v.first);
      return std::string(buf);
    };

    std::printf("%-10s %-16s %-16s %-16s %-16s %-16s %-16s\n", "learner",
                "f1", "accuracy", "precision", "recall", "auc", "mbps");
    for (const Row& row : rows) {
      auto lookup = [&row](const char* name)
          -> std::pair<double, std::optional<double>> {
        auto it = row.metrics.find(name);
        if (it == row.metrics.end()) return {0.0, std::nullopt};
        return it->second;
      };
      std::printf("%-10s %-16s %-16s %-16s %-16s %-16s %-16s\n",
                  row.learner.c_str(), cell(lookup("f1")).c_str(),
                  cell(lookup("accuracy")).c_str(),
                  cell(lookup("precision")).c_str(),
                  cell(lookup("recall")).c_str(), cell(lookup("auc")).c_str(),
                  cell({row.mbps_mean, row.mbps_std}).c_str());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "report: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming anomaly-detection engine for IoT network traffic"};
  app.require_subcommand(1);

  // extract
  std::string extract_in, extract_out;
  auto* extract = app.add_subcommand(
      "extract", "Convert pcap or packet CSV into a feature CSV");
  extract->add_option("--in", extract_in, "input .pcap/.cap/.csv")->required();
  extract->add_option("--out", extract_out, "output feature CSV")->required();

  // synth
  std::string synth_spec, synth_pools, synth_out;
  bool synth_synthetic = false;
  std::uint64_t synth_pool_seed = 1;
  auto* synth = app.add_subcommand(
      "synth", "Build a four-phase drift stream from labeled pools");
  synth->add_option("--spec", synth_spec, "stream spec file")->required();
  synth->add_option("--pools", synth_pools, "directory with <pool_id>.csv files");
  synth->add_flag("--synthetic", synth_synthetic,
                  "generate synthetic pools sized to the spec");
  synth->add_option("--pool-seed", synth_pool_seed,
                    "seed for synthetic pools (default 1)");
  synth->add_option("--out", synth_out, "output stream CSV")->required();

  // run
  std::string run_config, run_out_dir;
  std::uint64_t run_seed = 0;
  std::size_t run_reps = 0;
  auto* run = app.add_subcommand(
      "run", "Prequential experiment: per-repetition results + aggregate");
  run->add_option("--config", run_config, "experiment config file")->required();
  run->add_option("--out-dir", run_out_dir, "output directory")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "root seed override");
  auto* reps_opt = run->add_option("--reps", run_reps, "repetition override");

  // report
  std::vector<std::string> report_files;
  auto* report = app.add_subcommand(
      "report", "Print a metrics table from run/aggregate JSON files");
  report->add_option("files", report_files, "run_*.json / aggregate.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (extract->parsed()) return cmd_extract(extract_in, extract_out);
  if (synth->parsed()) {
    if (!synth_synthetic && synth_pools.empty()) {
      std::cerr << "synth: need --pools or --synthetic\n";
      return kExitUsage;
    }
    return cmd_synth(synth_spec, synth_pools, synth_synthetic, synth_pool_seed,
                     synth_out);
  }
  if (run->parsed()) {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> reps_override;
    if (seed_opt->count() > 0) seed_override = run_seed;
    if (reps_opt->count() > 0) reps_override = run_reps;
    return cmd_run(run_config, run_out_dir, seed_override, reps_override);
  }
  if (report->parsed()) return cmd_report(report_files);
  return kExitUsage;
}
