#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advf/numcore.hpp"

namespace advf::nn {

/// An input in [0,1]^d with its truth label.
struct Sample {
  Vector x0;
  std::size_t label = 0;
};

enum class Activation { ReLU, None };

struct Layer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::None;
};

struct GradientResult {
  Vector g;
  double loss = 0.0;
};

/// Feedforward classifier with a softmax head and cross-entropy loss.
class NeuralModel {
 public:
  NeuralModel() = default;
  /// Throws DimensionError if the layer shapes do not chain.
  NeuralModel(std::string model_id, std::vector<Layer> layers);

  const std::string& id() const { return model_id_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }
  std::size_t input_size() const;
  std::size_t class_count() const;
  /// Layer widths from input to output, e.g. {16, 32, 10}.
  std::vector<std::size_t> arch() const;

  Vector logits(const Vector& x) const;
  /// Softmax probabilities.
  Vector forward(const Vector& x) const;
  /// Argmax of forward(x), ties to the lowest index.
  std::size_t predict_class(const Vector& x) const;

  /// ∇ₓ of cross-entropy(softmax(logits(x)), label) by backprop.
  GradientResult input_gradient(const Sample& s) const;
  /// Row k is ∇ₓ logit_k(x). Returned alongside the logits themselves.
  Matrix logit_jacobian(const Vector& x, Vector* logits_out = nullptr) const;

  bool operator==(const NeuralModel& other) const;

 private:
  void check_input(const Vector& x) const;

  std::string model_id_;
  std::vector<Layer> layers_;
};

Vector softmax(const Vector& logits);
double cross_entropy(const Vector& probabilities, std::size_t label);

struct TrainOptions {
  std::size_t epochs = 50;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
};

/// Minibatch SGD on cross-entropy. `hidden` lists hidden-layer widths; input
/// width and class count come from the data (class count is max label + 1
/// unless `class_count` is larger). Deterministic given rng's seed.
NeuralModel train(std::string model_id, const std::vector<std::size_t>& hidden,
                  const std::vector<Sample>& data, const TrainOptions& options, Rng& rng,
                  std::size_t class_count = 0);

double accuracy(const NeuralModel& model, const std::vector<Sample>& data);

}  // namespace advf::nn
