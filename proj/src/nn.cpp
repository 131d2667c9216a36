#include "advf/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace advf::nn {

NeuralModel::NeuralModel(std::string model_id, std::vector<Layer> layers)
    : model_id_(std::move(model_id)), layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("model '" + model_id_ + "' has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    if (layer.bias.size() != layer.weights.rows()) {
      throw DimensionError("layer " + std::to_string(i) + ": bias length does not match rows");
    }
    if (i > 0 && layer.weights.cols() != layers_[i - 1].weights.rows()) {
      throw DimensionError("layer " + std::to_string(i) + ": input width does not chain");
    }
  }
}

std::size_t NeuralModel::input_size() const { return layers_.front().weights.cols(); }
std::size_t NeuralModel::class_count() const { return layers_.back().weights.rows(); }

std::vector<std::size_t> NeuralModel::arch() const {
  std::vector<std::size_t> widths{input_size()};
  for (const auto& layer : layers_) widths.push_back(layer.weights.rows());
  return widths;
}

void NeuralModel::check_input(const Vector& x) const {
  if (x.size() != input_size()) {
    throw DimensionError("model '" + model_id_ + "' expects input width " +
                         std::to_string(input_size()) + ", got " + std::to_string(x.size()));
  }
}

namespace {

void apply(Activation act, Vector& v) {
  if (act == Activation::ReLU) {
    for (double& x : v) x = std::max(0.0, x);
  }
}

// Pre-activation and post-activation values of every layer.
struct Trace {
  std::vector<Vector> pre;
  std::vector<Vector> post;
};

Trace run_trace(const std::vector<Layer>& layers, const Vector& x) {
  Trace t;
  t.pre.reserve(layers.size());
  t.post.reserve(layers.size());
  const Vector* in = &x;
  for (const auto& layer : layers) {
    Vector z = matvec(layer.weights, *in);
    z += layer.bias;
    t.pre.push_back(z);
    apply(layer.activation, z);
    t.post.push_back(std::move(z));
    in = &t.post.back();
  }
  return t;
}

// Pulls an upstream gradient w.r.t. the last layer's post-activation output
// back to the input.
Vector backprop(const std::vector<Layer>& layers, const Trace& t, Vector grad) {
  for (std::size_t li = layers.size(); li-- > 0;) {
    const auto& layer = layers[li];
    if (layer.activation == Activation::ReLU) {
      for (std::size_t j = 0; j < grad.size(); ++j) {
        if (t.pre[li][j] <= 0.0) grad[j] = 0.0;
      }
    }
    grad = matvec_transposed(layer.weights, grad);
  }
  return grad;
}

}  // namespace

Vector softmax(const Vector& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vector p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  p *= 1.0 / total;
  return p;
}

double cross_entropy(const Vector& probabilities, std::size_t label) {
  // Floor keeps the loss finite when the softmax underflows.
  return -std::log(std::max(probabilities[label], 1e-300));
}

Vector NeuralModel::logits(const Vector& x) const {
  check_input(x);
  Vector h = x;
  for (const auto& layer : layers_) {
    Vector z = matvec(layer.weights, h);
    z += layer.bias;
    apply(layer.activation, z);
    h = std::move(z);
  }
  return h;
}

Vector NeuralModel::forward(const Vector& x) const { return softmax(logits(x)); }

std::size_t NeuralModel::predict_class(const Vector& x) const { return argmax(forward(x).view()); }

GradientResult NeuralModel::input_gradient(const Sample& s) const {
  check_input(s.x0);
  if (s.label >= class_count()) {
    throw DimensionError("label " + std::to_string(s.label) + " out of range for " +
                         std::to_string(class_count()) + " classes");
  }
  Trace t = run_trace(layers_, s.x0);
  Vector p = softmax(t.post.back());
  GradientResult result;
  result.loss = cross_entropy(p, s.label);
  Vector upstream = p;
  upstream[s.label] -= 1.0;
  result.g = backprop(layers_, t, std::move(upstream));
  return result;
}

Matrix NeuralModel::logit_jacobian(const Vector& x, Vector* logits_out) const {
  check_input(x);
  Trace t = run_trace(layers_, x);
  const std::size_t k = class_count();
  Matrix jac(k, input_size());
  for (std::size_t c = 0; c < k; ++c) {
    Vector upstream(k);
    upstream[c] = 1.0;
    Vector row = backprop(layers_, t, std::move(upstream));
    std::copy(row.begin(), row.end(), jac.values().begin() + c * input_size());
  }
  if (logits_out) *logits_out = t.post.back();
  return jac;
}

bool NeuralModel::operator==(const NeuralModel& other) const {
  if (model_id_ != other.model_id_ || layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.activation != b.activation || !(a.weights == b.weights) || !(a.bias == b.bias)) {
      return false;
    }
  }
  return true;
}

NeuralModel train(std::string model_id, const std::vector<std::size_t>& hidden,
                  const std::vector<Sample>& data, const TrainOptions& options, Rng& rng,
                  std::size_t class_count) {
  if (data.empty()) throw std::invalid_argument("train: empty data for '" + model_id + "'");
  if (options.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");

  const std::size_t input = data.front().x0.size();
  std::size_t classes = class_count;
  for (const auto& s : data) {
    if (s.x0.size() != input) throw DimensionError("train: inconsistent sample widths");
    classes = std::max(classes, s.label + 1);
  }
  // A single-class dataset still gets a two-way head so softmax is meaningful.
  classes = std::max<std::size_t>(classes, 2);

  std::vector<std::size_t> widths{input};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(classes);

  // He-normal init for ReLU layers, Glorot-ish for the linear head.
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    Layer layer{Matrix(widths[i + 1], widths[i]), Vector(widths[i + 1]),
                last ? Activation::None : Activation::ReLU};
    const double stddev = std::sqrt((last ? 1.0 : 2.0) / static_cast<double>(widths[i]));
    for (double& w : layer.weights.values()) w = rng.normal(0.0, stddev);
    layers.push_back(std::move(layer));
  }
  NeuralModel model(model_id, std::move(layers));
  auto& params = model.mutable_layers();

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<Matrix> grad_w;
  std::vector<Vector> grad_b;
  for (const auto& layer : params) {
    grad_w.emplace_back(layer.weights.rows(), layer.weights.cols());
    grad_b.emplace_back(layer.bias.size());
  }

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      for (auto& g : grad_w) std::fill(g.values().begin(), g.values().end(), 0.0);
      for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);

      double batch_loss = 0.0;
      for (std::size_t idx = start; idx < end; ++idx) {
        const Sample& s = data[order[idx]];
        Trace t = run_trace(params, s.x0);
        Vector p = softmax(t.post.back());
        batch_loss += cross_entropy(p, s.label);
        Vector delta = p;
        delta[s.label] -= 1.0;
        for (std::size_t li = params.size(); li-- > 0;) {
          if (params[li].activation == Activation::ReLU) {
            for (std::size_t j = 0; j < delta.size(); ++j) {
              if (t.pre[li][j] <= 0.0) delta[j] = 0.0;
            }
          }
          const Vector& in = li == 0 ? s.x0 : t.post[li - 1];
          auto& gw = grad_w[li];
          for (std::size_t r = 0; r < gw.rows(); ++r) {
            if (delta[r] == 0.0) continue;
            for (std::size_t c = 0; c < gw.cols(); ++c) gw(r, c) += delta[r] * in[c];
          }
          grad_b[li] += delta;
          if (li > 0) delta = matvec_transposed(params[li].weights, delta);
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("training diverged for '" + model_id + "' (non-finite loss)");
      }

      const double step = options.learning_rate / static_cast<double>(end - start);
      for (std::size_t li = 0; li < params.size(); ++li) {
        auto& w = params[li].weights.values();
        const auto& gw = grad_w[li].values();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * gw[i];
        for (std::size_t i = 0; i < params[li].bias.size(); ++i) {
          params[li].bias[i] -= step * grad_b[li][i];
        }
      }
    }
  }

  for (const auto& layer : params) {
    if (!all_finite(layer.weights.values()) || !all_finite(layer.bias.view())) {
      throw std::runtime_error("training diverged for '" + model_id + "' (non-finite weights)");
    }
  }
  return model;
}

double accuracy(const NeuralModel& model, const std::vector<Sample>& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : data) {
    if (model.predict_class(s.x0) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace advf::nn
