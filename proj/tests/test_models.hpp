#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "advf/nn.hpp"
#include "advf/numcore.hpp"

namespace advf::testing {

/// Single linear softmax layer.
inline nn::NeuralModel linear_model(Matrix w, Vector b, std::string id = "linear") {
  return nn::NeuralModel(std::move(id), {nn::Layer{std::move(w), std::move(b), nn::Activation::None}});
}

/// Random ReLU network with the given widths (input first, classes last).
inline nn::NeuralModel random_model(const std::vector<std::size_t>& widths, std::uint64_t seed,
                                    double scale = 1.0) {
  Rng rng(seed);
  std::vector<nn::Layer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    nn::Layer layer{Matrix(widths[i + 1], widths[i]), Vector(widths[i + 1]),
                    i + 2 == widths.size() ? nn::Activation::None : nn::Activation::ReLU};
    for (double& w : layer.weights.values()) w = rng.normal(0.0, scale);
    for (double& b : layer.bias) b = rng.normal(0.0, 0.1 * scale);
    layers.push_back(std::move(layer));
  }
  return nn::NeuralModel("random-" + std::to_string(seed), std::move(layers));
}

inline Vector random_unit_box(std::size_t n, Rng& rng) {
  Vector v(n);
  for (double& x : v) x = rng.uniform();
  return v;
}

inline Vector random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = rng.normal(0.0, scale);
  return v;
}

/// Two well-separated Gaussian blobs in [0,1]^2.
inline std::vector<nn::Sample> two_blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<nn::Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % 2;
    const double center = label == 0 ? 0.3 : 0.7;
    Vector x{std::clamp(rng.normal(center, 0.07), 0.0, 1.0),
             std::clamp(rng.normal(center, 0.07), 0.0, 1.0)};
    out.push_back({std::move(x), label});
  }
  return out;
}

}  // namespace advf::testing
