#include "advf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace advf::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

CampaignConfig CampaignConfig::defaults() {
  CampaignConfig cfg;
  for (auto family : attacks::all_families()) {
    cfg.attacks.push_back(attacks::AttackConfig::defaults(family));
  }
  return cfg;
}

void CampaignConfig::validate() const {
  try {
    dataset.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("dataset", e.what());
  }
  if (zoo.architectures.size() < 2) {
    throw ConfigError("zoo.architectures", "at least two architectures are required");
  }
  if (zoo.training.epochs == 0 || zoo.training.batch_size == 0 ||
      !(zoo.training.learning_rate > 0.0)) {
    throw ConfigError("zoo", "epochs, batch_size and learning_rate must be positive");
  }
  if (attacks.empty()) throw ConfigError("attacks", "at least one attack is required");
  std::set<attacks::Family> seen;
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    try {
      attacks[i].validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("attacks[" + std::to_string(i) + "]", e.what());
    }
    if (!seen.insert(attacks[i].family).second) {
      throw ConfigError("attacks[" + std::to_string(i) + "]", "duplicate attack family");
    }
  }
  if (detector.tree_count == 0) throw ConfigError("detector.tree_count", "must be at least 1");
  if (detector.min_samples_split < 2) {
    throw ConfigError("detector.min_samples_split", "must be at least 2");
  }
  if (samples_per_attack == 0) throw ConfigError("run.samples_per_attack", "must be at least 1");
  if (samples_per_attack > dataset.test_samples) {
    throw ConfigError("run.samples_per_attack", "exceeds dataset.test_samples");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("run.train_fraction", "must lie in (0, 1)");
  }
}

namespace {

// Typed access to one JSON object that rejects keys it was not asked about.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    if (!node_.contains(key)) return;
    const json& v = node_.at(key);
    const std::string where = path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(where, "expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
    }
    out = v.get<T>();
  }

  const json* child(const char* key) {
    used_.insert(key);
    return node_.contains(key) ? &node_.at(key) : nullptr;
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!used_.count(item.key())) throw ConfigError(path_ + "." + item.key(), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

attacks::AttackConfig parse_attack(const json& node, const std::string& path) {
  if (!node.is_object() || !node.contains("family")) {
    throw ConfigError(path, "attack entries need a 'family'");
  }
  Section s(node, path);
  std::string family;
  s.read("family", family);
  attacks::AttackConfig cfg;
  try {
    cfg = attacks::AttackConfig::defaults(attacks::family_from_string(family));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".family", e.what());
  }
  std::string norm = advf::to_string(cfg.norm);
  s.read("norm", norm);
  try {
    cfg.norm = norm_from_string(norm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".norm", e.what());
  }
  s.read("epsilon", cfg.epsilon);
  s.read("steps", cfg.steps);
  s.read("step_size", cfg.step_size);
  s.read("overshoot", cfg.overshoot);
  s.read("minimal_epsilon", cfg.minimal_epsilon);
  s.read("bisection_tolerance", cfg.bisection_tolerance);
  s.read("random_start", cfg.random_start);
  s.finish();
  return cfg;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

CampaignConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_column(text, e.byte), "invalid JSON");
  }

  CampaignConfig cfg = CampaignConfig::defaults();
  Section root(doc, "config");

  if (const json* node = root.child("dataset")) {
    Section s(*node, "dataset");
    s.read("dimension", cfg.dataset.dimension);
    s.read("class_count", cfg.dataset.class_count);
    s.read("train_samples", cfg.dataset.train_samples);
    s.read("test_samples", cfg.dataset.test_samples);
    s.read("cluster_stddev", cfg.dataset.cluster_stddev);
    s.read("mean_low", cfg.dataset.mean_low);
    s.read("mean_high", cfg.dataset.mean_high);
    s.finish();
  }

  if (const json* node = root.child("zoo")) {
    Section s(*node, "zoo");
    if (const json* archs = s.child("architectures")) {
      if (!archs->is_array()) throw ConfigError("zoo.architectures", "expected an array");
      cfg.zoo.architectures.clear();
      for (std::size_t i = 0; i < archs->size(); ++i) {
        const auto& a = (*archs)[i];
        const std::string where = "zoo.architectures[" + std::to_string(i) + "]";
        if (!a.is_array()) throw ConfigError(where, "expected an array of widths");
        std::vector<std::size_t> widths;
        for (const auto& w : a) {
          if (!w.is_number_unsigned() || w.get<std::size_t>() == 0) {
            throw ConfigError(where, "widths must be positive integers");
          }
          widths.push_back(w.get<std::size_t>());
        }
        cfg.zoo.architectures.push_back(std::move(widths));
      }
    }
    s.read("epochs", cfg.zoo.training.epochs);
    s.read("learning_rate", cfg.zoo.training.learning_rate);
    s.read("batch_size", cfg.zoo.training.batch_size);
    s.finish();
  }

  if (const json* node = root.child("attacks")) {
    if (!node->is_array()) throw ConfigError("attacks", "expected an array");
    cfg.attacks.clear();
    for (std::size_t i = 0; i < node->size(); ++i) {
      cfg.attacks.push_back(parse_attack((*node)[i], "attacks[" + std::to_string(i) + "]"));
    }
  }

  if (const json* node = root.child("detector")) {
    Section s(*node, "detector");
    s.read("tree_count", cfg.detector.tree_count);
    s.read("max_features", cfg.detector.max_features);
    s.read("max_depth", cfg.detector.max_depth);
    s.read("min_samples_split", cfg.detector.min_samples_split);
    s.read("bootstrap", cfg.detector.bootstrap);
    s.finish();
  }

  if (const json* node = root.child("run")) {
    Section s(*node, "run");
    s.read("seed", cfg.seed);
    s.read("samples_per_attack", cfg.samples_per_attack);
    s.read("train_fraction", cfg.train_fraction);
    s.read("include_failed_attacks", cfg.include_failed_attacks);
    s.finish();
  }
  root.finish();

  cfg.validate();
  return cfg;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const CampaignConfig& cfg) {
  ordered_json doc;
  doc["dataset"] = {{"dimension", cfg.dataset.dimension},
                    {"class_count", cfg.dataset.class_count},
                    {"train_samples", cfg.dataset.train_samples},
                    {"test_samples", cfg.dataset.test_samples},
                    {"cluster_stddev", cfg.dataset.cluster_stddev},
                    {"mean_low", cfg.dataset.mean_low},
                    {"mean_high", cfg.dataset.mean_high}};
  doc["zoo"] = {{"architectures", cfg.zoo.architectures},
                {"epochs", cfg.zoo.training.epochs},
                {"learning_rate", cfg.zoo.training.learning_rate},
                {"batch_size", cfg.zoo.training.batch_size}};
  ordered_json list = ordered_json::array();
  for (const auto& a : cfg.attacks) {
    list.push_back({{"family", attacks::to_string(a.family)},
                    {"norm", advf::to_string(a.norm)},
                    {"epsilon", a.epsilon},
                    {"steps", a.steps},
                    {"step_size", a.step_size},
                    {"overshoot", a.overshoot},
                    {"minimal_epsilon", a.minimal_epsilon},
                    {"bisection_tolerance", a.bisection_tolerance},
                    {"random_start", a.random_start}});
  }
  doc["attacks"] = std::move(list);
  doc["detector"] = {{"tree_count", cfg.detector.tree_count},
                     {"max_features", cfg.detector.max_features},
                     {"max_depth", cfg.detector.max_depth},
                     {"min_samples_split", cfg.detector.min_samples_split},
                     {"bootstrap", cfg.detector.bootstrap}};
  doc["run"] = {{"seed", cfg.seed},
                {"samples_per_attack", cfg.samples_per_attack},
                {"train_fraction", cfg.train_fraction},
                {"include_failed_attacks", cfg.include_failed_attacks}};
  return doc.dump(2);
}

}  // namespace advf::pipeline
