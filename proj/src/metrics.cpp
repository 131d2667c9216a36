#include "advf/metrics.hpp"

#include <stdexcept>
#include <string>

namespace advf::forest {

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

MetricsReport compute_metrics(const std::vector<std::size_t>& predicted,
                              const std::vector<std::size_t>& truth, std::size_t class_count) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("compute_metrics: " + std::to_string(predicted.size()) +
                                " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  MetricsReport m;
  m.confusion.assign(class_count, std::vector<std::size_t>(class_count, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= class_count || predicted[i] >= class_count) {
      throw std::invalid_argument("compute_metrics: label out of range at index " +
                                  std::to_string(i));
    }
    ++m.confusion[truth[i]][predicted[i]];
    if (truth[i] == predicted[i]) ++correct;
  }

  m.precision.resize(class_count);
  m.recall.resize(class_count);
  m.f1.resize(class_count);
  m.support.resize(class_count);
  for (std::size_t k = 0; k < class_count; ++k) {
    std::size_t predicted_k = 0;
    std::size_t actual_k = 0;
    for (std::size_t j = 0; j < class_count; ++j) {
      predicted_k += m.confusion[j][k];
      actual_k += m.confusion[k][j];
    }
    const double tp = static_cast<double>(m.confusion[k][k]);
    m.precision[k] = predicted_k ? tp / static_cast<double>(predicted_k) : 0.0;
    m.recall[k] = actual_k ? tp / static_cast<double>(actual_k) : 0.0;
    m.f1[k] = f1_score(m.precision[k], m.recall[k]);
    m.support[k] = actual_k;
    m.macro_precision += m.precision[k];
    m.macro_recall += m.recall[k];
    m.macro_f1 += m.f1[k];
  }
  if (class_count > 0) {
    const double c = static_cast<double>(class_count);
    m.macro_precision /= c;
    m.macro_recall /= c;
    m.macro_f1 /= c;
  }
  m.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / truth.size();
  return m;
}

}  // namespace advf::forest
