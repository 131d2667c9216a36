#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "advf/forest.hpp"
#include "advf/metrics.hpp"
#include "advf/records.hpp"

namespace advf::pipeline {

// ---------------------------------------------------------------------------
// Q1: how much does each attack hurt each model?

struct AccuracyCell {
  std::string model_id;
  attacks::Family attack = attacks::Family::FGSM;
  std::size_t samples = 0;
  double clean_accuracy = 0.0;
  double adversarial_accuracy = 0.0;
  double success_rate = 0.0;
};

struct ModelAccuracySummary {
  double clean_avg = 0.0;
  double adversarial_avg = 0.0;
  /// Population standard deviation across attacks.
  double clean_std = 0.0;
  double adversarial_std = 0.0;
};

struct AccuracyReport {
  std::vector<std::string> models;
  std::vector<attacks::Family> attacks;
  /// Row-major by (model, attack) in the order of `models` and `attacks`.
  std::vector<AccuracyCell> cells;
  std::map<std::string, ModelAccuracySummary> per_model;
  /// Optional clean accuracy of each model on the whole test split.
  std::map<std::string, double> clean_test_accuracy;
  /// Random guessing over the task's classes.
  double baseline = 0.0;

  const AccuracyCell& cell(const std::string& model, attacks::Family attack) const;
};

AccuracyReport q1_attack_accuracy(const std::vector<PredictionRecord>& records,
                                  const std::map<std::string, double>& clean_eval = {});

// ---------------------------------------------------------------------------
// Q2-Q4: forest detectors on output vectors.

/// Rows of (output vector → label) with the sample id each row came from.
struct DetectionTable {
  std::vector<Vector> features;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> groups;
  std::vector<std::string> label_names;
};

/// Clean outputs (one per model and sample) against every adversarial output.
DetectionTable build_q2_table(const std::vector<PredictionRecord>& records);
/// Adversarial output → model id.
DetectionTable build_q3_table(const std::vector<PredictionRecord>& records, bool include_failed);
/// Adversarial output → attack family.
DetectionTable build_q4_table(const std::vector<PredictionRecord>& records, bool include_failed);

struct GroupSplit {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Assigns whole sample ids to the training side (round(fraction·ids), at
/// least one id per side) so no sample contributes rows to both sides.
GroupSplit split_by_group(const DetectionTable& table, double train_fraction, const Rng& rng);

struct QuestionReport {
  std::string question;
  std::vector<std::string> labels;
  forest::MetricsReport metrics;
  double baseline = 0.0;
  std::vector<std::size_t> train_support;
  std::vector<std::size_t> test_support;
};

struct DetectionResult {
  QuestionReport report;
  forest::ForestModel detector;
  DetectionTable table;
  GroupSplit split;
};

/// Splits, fits and scores. `rng` seeds both the split and the forest.
DetectionResult run_detection(const std::string& question, DetectionTable table,
                              const forest::ForestParams& params, double train_fraction,
                              const Rng& rng);

DetectionResult q2_detect_adversarial(const std::vector<PredictionRecord>& records,
                                      const forest::ForestParams& params, double train_fraction,
                                      const Rng& rng);
DetectionResult q3_model_attribution(const std::vector<PredictionRecord>& records,
                                     const forest::ForestParams& params, double train_fraction,
                                     const Rng& rng, bool include_failed = false);
DetectionResult q4_attack_attribution(const std::vector<PredictionRecord>& records,
                                      const forest::ForestParams& params, double train_fraction,
                                      const Rng& rng, bool include_failed = false);

// ---------------------------------------------------------------------------
// Report files.

std::string accuracy_report_to_json(const AccuracyReport& report);
std::string accuracy_report_to_csv(const AccuracyReport& report);
std::string question_report_to_json(const QuestionReport& report);
std::string question_report_to_csv(const QuestionReport& report);

}  // namespace advf::pipeline
