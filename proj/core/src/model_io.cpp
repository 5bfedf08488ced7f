#include "driftstream/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "driftstream/adaptive_forest.hpp"
#include "driftstream/adwin.hpp"
#include "driftstream/batch_forest.hpp"
#include "driftstream/error.hpp"
#include "driftstream/hoeffding_tree.hpp"
#include "driftstream/naive_bayes.hpp"

namespace driftstream {

using nlohmann::json;

class AdwinSerializer {
 public:
  static json save(const AdwinDetector& d) {
    json rows = json::array();
    for (const auto& row : d.rows_) {
      json buckets = json::array();
      for (const auto& b : row) buckets.push_back({{"sum", b.sum}, {"var", b.var}});
      rows.push_back(buckets);
    }
    return {{"delta", d.delta_},
            {"rows", rows},
            {"width", d.width_},
            {"total_sum", d.total_sum_},
            {"total_var", d.total_var_},
            {"detections", d.detections_}};
  }

  static AdwinDetector load(const json& j) {
    AdwinDetector d(j.at("delta").get<double>());
    d.width_ = j.at("width").get<std::uint64_t>();
    d.total_sum_ = j.at("total_sum").get<double>();
    d.total_var_ = j.at("total_var").get<double>();
    d.detections_ = j.at("detections").get<std::uint64_t>();
    for (const auto& row : j.at("rows")) {
      d.rows_.emplace_back();
      for (const auto& b : row)
        d.rows_.back().push_back(
            {b.at("sum").get<double>(), b.at("var").get<double>()});
    }
    return d;
  }
};

class ModelSerializer {
 public:
  // --- shared pieces ---

  static json save_moments(const RunningMoments& m) {
    return {{"count", m.count}, {"mean", m.mean}, {"m2", m.m2}};
  }
  static RunningMoments load_moments(const json& j) {
    RunningMoments m;
    m.count = j.at("count").get<std::uint64_t>();
    m.mean = j.at("mean").get<double>();
    m.m2 = j.at("m2").get<double>();
    return m;
  }

  // --- naive bayes ---

  static json save(const GaussianNaiveBayes& nb) {
    json stats = json::array();
    for (const auto& per_class : nb.stats_) {
      json row = json::array();
      for (const auto& m : per_class) row.push_back(save_moments(m));
      stats.push_back(row);
    }
    return {{"class_counts", nb.class_count_},
            {"total", nb.total_count_},
            {"stats", stats},
            {"feature_min", nb.feature_min_},
            {"feature_max", nb.feature_max_}};
  }

  static std::unique_ptr<GaussianNaiveBayes> load_nb(const json& j) {
    auto nb = std::make_unique<GaussianNaiveBayes>();
    nb->class_count_ = j.at("class_counts").get<std::array<std::uint64_t, 2>>();
    nb->total_count_ = j.at("total").get<std::uint64_t>();
    const auto& stats = j.at("stats");
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t f = 0; f < kFeatureCount; ++f)
        nb->stats_[c][f] = load_moments(stats.at(c).at(f));
    nb->feature_min_ = j.at("feature_min").get<std::array<double, kFeatureCount>>();
    nb->feature_max_ = j.at("feature_max").get<std::array<double, kFeatureCount>>();
    return nb;
  }

  // --- hoeffding tree ---

  static json save_node(const HoeffdingTree::Node& node) {
    json j;
    j["split_feature"] = node.split_feature;
    j["threshold"] = node.threshold;
    j["class_counts"] = node.class_counts;
    j["weight_since_eval"] = node.weight_since_eval;
    j["candidate_features"] = node.candidate_features;
    j["range_seen"] = node.range_seen;
    if (node.range_seen) {
      j["feature_min"] = node.feature_min;
      j["feature_max"] = node.feature_max;
    }
    if (node.is_leaf()) {
      json obs = json::array();
      for (const auto& per_feature : node.observers) {
        obs.push_back(
            json::array({save_moments(per_feature[0]), save_moments(per_feature[1])}));
      }
      j["observers"] = obs;
    } else {
      j["left"] = save_node(*node.left);
      j["right"] = save_node(*node.right);
    }
    if (node.error_adwin) j["error_adwin"] = AdwinSerializer::save(*node.error_adwin);
    if (node.alternate) j["alternate"] = save_node(*node.alternate);
    return j;
  }

  static std::unique_ptr<HoeffdingTree::Node> load_node(const json& j) {
    auto node = std::make_unique<HoeffdingTree::Node>();
    node->split_feature = j.at("split_feature").get<int>();
    node->threshold = j.at("threshold").get<double>();
    node->class_counts = j.at("class_counts").get<std::array<double, 2>>();
    node->weight_since_eval = j.at("weight_since_eval").get<double>();
    node->candidate_features = j.at("candidate_features").get<std::vector<int>>();
    node->range_seen = j.at("range_seen").get<bool>();
    if (node->range_seen) {
      node->feature_min = j.at("feature_min").get<std::array<double, kFeatureCount>>();
      node->feature_max = j.at("feature_max").get<std::array<double, kFeatureCount>>();
    }
    if (node->is_leaf()) {
      const auto& obs = j.at("observers");
      for (std::size_t f = 0; f < kFeatureCount; ++f)
        for (std::size_t c = 0; c < 2; ++c)
          node->observers[f][c] = load_moments(obs.at(f).at(c));
    } else {
      node->left = load_node(j.at("left"));
      node->right = load_node(j.at("right"));
    }
    if (j.contains("error_adwin"))
      node->error_adwin =
          std::make_unique<AdwinDetector>(AdwinSerializer::load(j.at("error_adwin")));
    if (j.contains("alternate")) node->alternate = load_node(j.at("alternate"));
    return node;
  }

  static json save_tree_config(const HoeffdingTreeConfig& c) {
    return {{"grace_period", c.grace_period},
            {"split_confidence", c.split_confidence},
            {"tie_threshold", c.tie_threshold},
            {"candidate_cuts", c.candidate_cuts},
            {"feature_subset", c.feature_subset},
            {"adaptive", c.adaptive},
            {"adwin_delta", c.adwin_delta},
            {"seed", c.seed}};
  }

  static HoeffdingTreeConfig load_tree_config(const json& j) {
    HoeffdingTreeConfig c;
    c.grace_period = j.at("grace_period").get<double>();
    c.split_confidence = j.at("split_confidence").get<double>();
    c.tie_threshold = j.at("tie_threshold").get<double>();
    c.candidate_cuts = j.at("candidate_cuts").get<int>();
    c.feature_subset = j.at("feature_subset").get<std::size_t>();
    c.adaptive = j.at("adaptive").get<bool>();
    c.adwin_delta = j.at("adwin_delta").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  }

  static json save(const HoeffdingTree& tree) {
    return {{"config", save_tree_config(tree.config_)},
            {"rng_state", tree.rng_.state()},
            {"samples_learned", tree.samples_learned_},
            {"splits", tree.splits_},
            {"promotions", tree.promotions_},
            {"root", save_node(*tree.root_)}};
  }

  static std::unique_ptr<HoeffdingTree> load_ht(const json& j) {
    auto tree =
        std::make_unique<HoeffdingTree>(load_tree_config(j.at("config")));
    tree->rng_.set_state(j.at("rng_state").get<std::uint64_t>());
    tree->samples_learned_ = j.at("samples_learned").get<std::uint64_t>();
    tree->splits_ = j.at("splits").get<std::uint64_t>();
    tree->promotions_ = j.at("promotions").get<std::uint64_t>();
    tree->root_ = load_node(j.at("root"));
    return tree;
  }

  // --- adaptive random forest ---

  static json save_arf_config(const ArfConfig& c) {
    return {{"tree_count", c.tree_count},
            {"lambda", c.lambda},
            {"feature_subset", c.feature_subset},
            {"warning_delta", c.warning_delta},
            {"drift_delta", c.drift_delta},
            {"detectors_enabled", c.detectors_enabled},
            {"constant_bag_weight", c.constant_bag_weight},
            {"grace_period", c.grace_period},
            {"split_confidence", c.split_confidence},
            {"tie_threshold", c.tie_threshold},
            {"seed", c.seed}};
  }

  static ArfConfig load_arf_config(const json& j) {
    ArfConfig c;
    c.tree_count = j.at("tree_count").get<std::size_t>();
    c.lambda = j.at("lambda").get<double>();
    c.feature_subset = j.at("feature_subset").get<std::size_t>();
    c.warning_delta = j.at("warning_delta").get<double>();
    c.drift_delta = j.at("drift_delta").get<double>();
    c.detectors_enabled = j.at("detectors_enabled").get<bool>();
    c.constant_bag_weight = j.at("constant_bag_weight").get<bool>();
    c.grace_period = j.at("grace_period").get<double>();
    c.split_confidence = j.at("split_confidence").get<double>();
    c.tie_threshold = j.at("tie_threshold").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  }

  static json save(const AdaptiveRandomForest& forest) {
    json members = json::array();
    for (const auto& m : forest.members_) {
      json member;
      member["tree"] = save(*m.tree);
      member["rng_state"] = m.rng.state();
      if (m.warning) member["warning"] = AdwinSerializer::save(*m.warning);
      if (m.drift) member["drift"] = AdwinSerializer::save(*m.drift);
      if (m.background) member["background"] = save(*m.background);
      members.push_back(member);
    }
    return {{"config", save_arf_config(forest.config_)},
            {"rng_state", forest.rng_.state()},
            {"samples_learned", forest.samples_learned_},
            {"replacements", forest.replacements_},
            {"warnings", forest.warnings_},
            {"members", members}};
  }

  static std::unique_ptr<AdaptiveRandomForest> load_arf(const json& j) {
    auto forest = std::make_unique<AdaptiveRandomForest>(
        load_arf_config(j.at("config")));
    forest->rng_.set_state(j.at("rng_state").get<std::uint64_t>());
    forest->samples_learned_ = j.at("samples_learned").get<std::uint64_t>();
    forest->replacements_ = j.at("replacements").get<std::uint64_t>();
    forest->warnings_ = j.at("warnings").get<std::uint64_t>();
    const auto& members = j.at("members");
    forest->members_.clear();
    for (const auto& mj : members) {
      AdaptiveRandomForest::Member m{Rng(0)};
      m.rng.set_state(mj.at("rng_state").get<std::uint64_t>());
      m.tree = load_ht(mj.at("tree"));
      if (mj.contains("warning"))
        m.warning = AdwinSerializer::load(mj.at("warning"));
      if (mj.contains("drift")) m.drift = AdwinSerializer::load(mj.at("drift"));
      if (mj.contains("background")) m.background = load_ht(mj.at("background"));
      forest->members_.push_back(std::move(m));
    }
    return forest;
  }

  // --- batch forest ---

  static json save_batch_node(const BatchForest::Node& node) {
    json j;
    j["split_feature"] = node.split_feature;
    j["threshold"] = node.threshold;
    j["counts"] = {node.counts[0], node.counts[1]};
    if (node.split_feature >= 0) {
      j["left"] = save_batch_node(*node.left);
      j["right"] = save_batch_node(*node.right);
    }
    return j;
  }

  static std::unique_ptr<BatchForest::Node> load_batch_node(const json& j) {
    auto node = std::make_unique<BatchForest::Node>();
    node->split_feature = j.at("split_feature").get<int>();
    node->threshold = j.at("threshold").get<double>();
    node->counts[0] = j.at("counts").at(0).get<std::uint64_t>();
    node->counts[1] = j.at("counts").at(1).get<std::uint64_t>();
    if (node->split_feature >= 0) {
      node->left = load_batch_node(j.at("left"));
      node->right = load_batch_node(j.at("right"));
    }
    return node;
  }

  static json save(const BatchForest& forest) {
    json trees = json::array();
    for (const auto& t : forest.trees_) trees.push_back(save_batch_node(*t));
    return {{"config",
             {{"tree_count", forest.config_.tree_count},
              {"bootstrap", forest.config_.bootstrap},
              {"feature_subset", forest.config_.feature_subset},
              {"max_depth", forest.config_.max_depth},
              {"min_leaf", forest.config_.min_leaf},
              {"seed", forest.config_.seed}}},
            {"trained_on", forest.trained_on_},
            {"trees", trees}};
  }

  static std::unique_ptr<BatchForest> load_batch(const json& j) {
    auto forest = std::make_unique<BatchForest>();
    const auto& c = j.at("config");
    forest->config_.tree_count = c.at("tree_count").get<std::size_t>();
    forest->config_.bootstrap = c.at("bootstrap").get<bool>();
    forest->config_.feature_subset = c.at("feature_subset").get<std::size_t>();
    forest->config_.max_depth = c.at("max_depth").get<std::size_t>();
    forest->config_.min_leaf = c.at("min_leaf").get<std::size_t>();
    forest->config_.seed = c.at("seed").get<std::uint64_t>();
    forest->trained_on_ = j.at("trained_on").get<std::uint64_t>();
    for (const auto& t : j.at("trees"))
      forest->trees_.push_back(load_batch_node(t));
    return forest;
  }
};

std::string save_model(const Learner& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  if (const auto* nb = dynamic_cast<const GaussianNaiveBayes*>(&model)) {
    j["type"] = "nb";
    j["model"] = ModelSerializer::save(*nb);
  } else if (const auto* arf = dynamic_cast<const AdaptiveRandomForest*>(&model)) {
    j["type"] = "arf";
    j["model"] = ModelSerializer::save(*arf);
  } else if (const auto* ht = dynamic_cast<const HoeffdingTree*>(&model)) {
    j["type"] = "ht";
    j["model"] = ModelSerializer::save(*ht);
  } else if (const auto* bf = dynamic_cast<const BatchForest*>(&model)) {
    j["type"] = "batch-rf";
    j["model"] = ModelSerializer::save(*bf);
  } else {
    throw Error("unknown model type: " + model.name());
  }
  return j.dump() + "\n";
}

void save_model(const Learner& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file: " + path.string());
  out << save_model(model);
}

std::unique_ptr<Learner> load_model(const std::string& json_text) {
  json j = json::parse(json_text);
  int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion)
    throw Error("unsupported model format version " + std::to_string(version));
  std::string type = j.at("type").get<std::string>();
  const json& body = j.at("model");
  if (type == "nb") return ModelSerializer::load_nb(body);
  if (type == "ht") return ModelSerializer::load_ht(body);
  if (type == "arf") return ModelSerializer::load_arf(body);
  if (type == "batch-rf") return ModelSerializer::load_batch(body);
  throw Error("unknown model type '" + type + "'");
}

std::unique_ptr<Learner> load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return load_model(text);
}

}  // namespace driftstream
