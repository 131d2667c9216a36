#include "advf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace advf::pipeline {

void DatasetSpec::validate() const {
  if (class_count < 2) throw std::invalid_argument("dataset.class_count must be at least 2");
  if (dimension < 2) throw std::invalid_argument("dataset.dimension must be at least 2");
  if (train_samples == 0 || test_samples == 0) {
    throw std::invalid_argument("dataset sample counts must be positive");
  }
  if (!(cluster_stddev > 0.0) || !std::isfinite(cluster_stddev)) {
    throw std::invalid_argument("dataset.cluster_stddev must be positive");
  }
  if (!(0.0 <= mean_low && mean_low < mean_high && mean_high <= 1.0)) {
    throw std::invalid_argument("dataset mean range must satisfy 0 <= low < high <= 1");
  }
}

namespace {

std::vector<nn::Sample> draw(const DatasetSpec& spec, const std::vector<Vector>& means,
                             std::size_t count, Rng& rng) {
  std::vector<nn::Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = i % spec.class_count;
    Vector x(spec.dimension);
    for (std::size_t j = 0; j < spec.dimension; ++j) {
      x[j] = std::clamp(rng.normal(means[label][j], spec.cluster_stddev), 0.0, 1.0);
    }
    out.push_back({std::move(x), label});
  }
  rng.shuffle(out);
  return out;
}

}  // namespace

Dataset generate_dataset(const DatasetSpec& spec, Rng& rng) {
  spec.validate();
  Dataset data;
  for (std::size_t k = 0; k < spec.class_count; ++k) {
    Vector mean(spec.dimension);
    for (double& m : mean) m = rng.uniform(spec.mean_low, spec.mean_high);
    data.class_means.push_back(std::move(mean));
  }
  data.train = draw(spec, data.class_means, spec.train_samples, rng);
  data.test = draw(spec, data.class_means, spec.test_samples, rng);
  return data;
}

}  // namespace advf::pipeline
