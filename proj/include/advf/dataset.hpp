#pragma once

#include <cstddef>
#include <vector>

#include "advf/nn.hpp"
#include "advf/numcore.hpp"

namespace advf::pipeline {

/// Gaussian class clusters clamped to the unit box.
struct DatasetSpec {
  std::size_t dimension = 32;
  std::size_t class_count = 10;
  std::size_t train_samples = 1000;
  std::size_t test_samples = 400;
  /// Per-component standard deviation around each class mean.
  double cluster_stddev = 0.15;
  /// Class means are drawn uniformly from [mean_low, mean_high]^d.
  double mean_low = 0.2;
  double mean_high = 0.8;

  void validate() const;
};

struct Dataset {
  std::vector<nn::Sample> train;
  std::vector<nn::Sample> test;
  std::vector<Vector> class_means;
};

/// Labels cycle through the classes, so each split is balanced to within one.
Dataset generate_dataset(const DatasetSpec& spec, Rng& rng);

}  // namespace advf::pipeline
