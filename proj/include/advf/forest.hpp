#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "advf/numcore.hpp"

namespace advf::forest {

struct ForestParams {
  std::size_t tree_count = 100;
  /// Features tried per node; 0 means ⌈√feature_count⌉.
  std::size_t max_features = 0;
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  bool bootstrap = true;

  std::size_t features_per_node(std::size_t feature_count) const;
};

/// Internal nodes route x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> counts;  // leaf class histogram

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_index(std::span<const double> x) const;
  const std::vector<double>& leaf_counts(std::span<const double> x) const {
    return nodes_[leaf_index(x)].counts;
  }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<Tree> trees, std::size_t class_count, std::size_t feature_count,
              ForestParams params);

  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t class_count() const { return class_count_; }
  std::size_t feature_count() const { return feature_count_; }
  const ForestParams& params() const { return params_; }

  /// Sum over trees of each leaf's normalized class histogram.
  std::vector<double> vote(std::span<const double> x) const;

 private:
  std::vector<Tree> trees_;
  std::size_t class_count_ = 0;
  std::size_t feature_count_ = 0;
  ForestParams params_;
};

struct Split {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
};

/// Gini-optimal split of the rows (indices into features/labels, repeats
/// allowed) over the candidate features. Thresholds are midpoints between
/// consecutive distinct values; ties go to the lower feature index, then the
/// lower threshold.
Split best_split(const std::vector<Vector>& features, std::span<const std::size_t> labels,
                 std::span<const std::size_t> rows, std::span<const std::size_t> candidates,
                 std::size_t class_count);

/// Labels must be < class_count; class_count 0 infers max label + 1. Tree t
/// draws from rng.derive(t), so the result does not depend on thread count.
ForestModel fit_forest(const std::vector<Vector>& features, const std::vector<std::size_t>& labels,
                       const ForestParams& params, const Rng& rng,
                       std::size_t class_count = 0);

std::size_t predict_forest(const ForestModel& f, const Vector& x);

struct LatencyResult {
  double mean_seconds = 0.0;
  std::size_t predictions = 0;
};

/// Mean wall time per prediction over at least `min_predictions` calls.
LatencyResult latency_probe(const ForestModel& f, const std::vector<Vector>& batch,
                            std::size_t min_predictions = 10000);

}  // namespace advf::forest
