#include "advf/serialize.hpp"

#include <stdexcept>

#include "json.hpp"

namespace advf {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// nlohmann prints doubles in shortest round-trip form, so reparsing is exact.
std::vector<double> doubles(const json& node, const char* what) {
  if (!node.is_array()) throw std::runtime_error(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) out.push_back(v.get<double>());
  return out;
}

void expect_header(const json& doc, const char* format, int version) {
  if (doc.value("format", "") != format) {
    throw std::runtime_error(std::string("expected format '") + format + "'");
  }
  if (doc.value("version", -1) != version) {
    throw std::runtime_error(std::string("unsupported ") + format + " version");
  }
}

}  // namespace

std::string model_to_json(const nn::NeuralModel& model) {
  ordered_json doc;
  doc["format"] = "advf-model";
  doc["version"] = kModelFormatVersion;
  doc["model_id"] = model.id();
  doc["arch"] = model.arch();
  ordered_json layers = ordered_json::array();
  for (const auto& layer : model.layers()) {
    ordered_json l;
    l["rows"] = layer.weights.rows();
    l["cols"] = layer.weights.cols();
    l["weights"] = layer.weights.values();
    l["bias"] = layer.bias.values();
    l["activation"] = layer.activation == nn::Activation::ReLU ? "relu" : "none";
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

nn::NeuralModel model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    expect_header(doc, "advf-model", kModelFormatVersion);
    std::vector<nn::Layer> layers;
    for (const auto& l : doc.at("layers")) {
      const auto act = l.at("activation").get<std::string>();
      if (act != "relu" && act != "none") throw std::runtime_error("unknown activation " + act);
      layers.push_back({Matrix(l.at("rows").get<std::size_t>(), l.at("cols").get<std::size_t>(),
                               doubles(l.at("weights"), "weights")),
                        Vector(doubles(l.at("bias"), "bias")),
                        act == "relu" ? nn::Activation::ReLU : nn::Activation::None});
    }
    nn::NeuralModel model(doc.at("model_id").get<std::string>(), std::move(layers));
    if (doc.contains("arch") && doc.at("arch").get<std::vector<std::size_t>>() != model.arch()) {
      throw std::runtime_error("arch does not match layer shapes");
    }
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model JSON: ") + e.what());
  }
}

std::string forest_to_json(const forest::ForestModel& f) {
  ordered_json doc;
  doc["format"] = "advf-forest";
  doc["version"] = kForestFormatVersion;
  doc["class_count"] = f.class_count();
  doc["feature_count"] = f.feature_count();
  const auto& p = f.params();
  doc["params"] = {{"tree_count", p.tree_count},
                   {"max_features", p.max_features},
                   {"max_depth", p.max_depth},
                   {"min_samples_split", p.min_samples_split},
                   {"bootstrap", p.bootstrap}};
  ordered_json trees = ordered_json::array();
  for (const auto& tree : f.trees()) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : tree.nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"counts", n.counts}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

forest::ForestModel forest_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    expect_header(doc, "advf-forest", kForestFormatVersion);
    const auto classes = doc.at("class_count").get<std::size_t>();
    const auto width = doc.at("feature_count").get<std::size_t>();
    const auto& jp = doc.at("params");
    forest::ForestParams p;
    p.tree_count = jp.at("tree_count").get<std::size_t>();
    p.max_features = jp.at("max_features").get<std::size_t>();
    p.max_depth = jp.at("max_depth").get<std::size_t>();
    p.min_samples_split = jp.at("min_samples_split").get<std::size_t>();
    p.bootstrap = jp.at("bootstrap").get<bool>();

    std::vector<forest::Tree> trees;
    for (const auto& jt : doc.at("trees")) {
      std::vector<forest::TreeNode> nodes;
      for (const auto& jn : jt) {
        forest::TreeNode n;
        if (jn.contains("counts")) {
          n.counts = doubles(jn.at("counts"), "counts");
          if (n.counts.size() != classes) throw std::runtime_error("leaf histogram width");
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        nodes.push_back(std::move(n));
      }
      if (nodes.empty()) throw std::runtime_error("empty tree");
      const auto count = static_cast<int>(nodes.size());
      for (int i = 0; i < count; ++i) {
        const auto& n = nodes[i];
        if (n.is_leaf()) continue;
        if (n.feature >= static_cast<int>(width) || n.left <= i || n.right <= i || n.left >= count ||
            n.right >= count) {
          throw std::runtime_error("malformed tree node " + std::to_string(i));
        }
      }
      trees.emplace_back(std::move(nodes));
    }
    return forest::ForestModel(std::move(trees), classes, width, p);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("forest JSON: ") + e.what());
  }
}

}  // namespace advf
