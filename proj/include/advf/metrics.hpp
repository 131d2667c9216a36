#pragma once

#include <cstddef>
#include <vector>

namespace advf::forest {

/// Per-class and macro-averaged classification metrics.
///
/// The macro precision is what result tables in this field often label
/// "mAP": the unweighted mean of per-class precision, not a ranking-based
/// average precision.
struct MetricsReport {
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::size_t> support;
  /// confusion[truth][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

/// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

/// Throws std::invalid_argument on length mismatch or out-of-range labels.
MetricsReport compute_metrics(const std::vector<std::size_t>& predicted,
                              const std::vector<std::size_t>& truth, std::size_t class_count);

}  // namespace advf::forest
