#include "advf/questions.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace advf::pipeline {

using nlohmann::ordered_json;

namespace {

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double population_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

std::vector<std::string> sorted_model_ids(const std::vector<PredictionRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.model_id);
  return {ids.begin(), ids.end()};
}

std::vector<attacks::Family> present_families(const std::vector<PredictionRecord>& records) {
  std::set<attacks::Family> present;
  for (const auto& r : records) present.insert(r.attack_id);
  std::vector<attacks::Family> out;
  for (auto f : attacks::all_families()) {
    if (present.count(f)) out.push_back(f);
  }
  return out;
}

}  // namespace

const AccuracyCell& AccuracyReport::cell(const std::string& model, attacks::Family attack) const {
  for (const auto& c : cells) {
    if (c.model_id == model && c.attack == attack) return c;
  }
  throw std::out_of_range("no accuracy cell for " + model + "/" + attacks::to_string(attack));
}

AccuracyReport q1_attack_accuracy(const std::vector<PredictionRecord>& records,
                                  const std::map<std::string, double>& clean_eval) {
  if (records.empty()) throw std::invalid_argument("q1: no records");
  AccuracyReport report;
  report.models = sorted_model_ids(records);
  report.attacks = present_families(records);
  report.clean_test_accuracy = clean_eval;
  report.baseline = 1.0 / static_cast<double>(records.front().clean_output.size());

  for (const auto& model : report.models) {
    std::vector<double> clean;
    std::vector<double> adv;
    for (auto attack : report.attacks) {
      AccuracyCell c{model, attack};
      std::size_t clean_hits = 0;
      std::size_t adv_hits = 0;
      std::size_t successes = 0;
      for (const auto& r : records) {
        if (r.model_id != model || r.attack_id != attack) continue;
        ++c.samples;
        if (argmax(r.clean_output.view()) == r.truth) ++clean_hits;
        if (argmax(r.adv_output.view()) == r.truth) ++adv_hits;
        if (r.attack_success) ++successes;
      }
      if (c.samples == 0) continue;
      const double n = static_cast<double>(c.samples);
      c.clean_accuracy = clean_hits / n;
      c.adversarial_accuracy = adv_hits / n;
      c.success_rate = successes / n;
      clean.push_back(c.clean_accuracy);
      adv.push_back(c.adversarial_accuracy);
      report.cells.push_back(std::move(c));
    }
    report.per_model[model] = {mean(clean), mean(adv), population_std(clean),
                               population_std(adv)};
  }
  return report;
}

DetectionTable build_q2_table(const std::vector<PredictionRecord>& records) {
  DetectionTable t;
  t.label_names = {"clean", "adversarial"};
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& r : records) {
    if (seen.insert({r.model_id, r.sample_id}).second) {
      t.features.push_back(r.clean_output);
      t.labels.push_back(0);
      t.groups.push_back(r.sample_id);
    }
    t.features.push_back(r.adv_output);
    t.labels.push_back(1);
    t.groups.push_back(r.sample_id);
  }
  return t;
}

DetectionTable build_q3_table(const std::vector<PredictionRecord>& records, bool include_failed) {
  DetectionTable t;
  t.label_names = sorted_model_ids(records);
  for (const auto& r : records) {
    if (!r.attack_success && !include_failed) continue;
    const auto it = std::find(t.label_names.begin(), t.label_names.end(), r.model_id);
    t.features.push_back(r.adv_output);
    t.labels.push_back(static_cast<std::size_t>(it - t.label_names.begin()));
    t.groups.push_back(r.sample_id);
  }
  return t;
}

DetectionTable build_q4_table(const std::vector<PredictionRecord>& records, bool include_failed) {
  DetectionTable t;
  const auto families = present_families(records);
  for (auto f : families) t.label_names.emplace_back(attacks::to_string(f));
  for (const auto& r : records) {
    if (!r.attack_success && !include_failed) continue;
    const auto it = std::find(families.begin(), families.end(), r.attack_id);
    t.features.push_back(r.adv_output);
    t.labels.push_back(static_cast<std::size_t>(it - families.begin()));
    t.groups.push_back(r.sample_id);
  }
  return t;
}

GroupSplit split_by_group(const DetectionTable& table, double train_fraction, const Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  std::set<std::size_t> unique(table.groups.begin(), table.groups.end());
  std::vector<std::size_t> ids(unique.begin(), unique.end());
  if (ids.size() < 2) throw std::invalid_argument("need at least two sample ids to split");
  Rng local = rng;
  local.shuffle(ids);
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * ids.size()));
  n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
  const std::set<std::size_t> train_ids(ids.begin(), ids.begin() + n_train);

  GroupSplit split;
  for (std::size_t i = 0; i < table.groups.size(); ++i) {
    (train_ids.count(table.groups[i]) ? split.train_rows : split.test_rows).push_back(i);
  }
  return split;
}

DetectionResult run_detection(const std::string& question, DetectionTable table,
                              const forest::ForestParams& params, double train_fraction,
                              const Rng& rng) {
  const std::size_t classes = table.label_names.size();
  std::set<std::size_t> present(table.labels.begin(), table.labels.end());
  if (classes < 2 || present.size() < 2) {
    throw std::invalid_argument(question + ": fewer than two labels present (" +
                                std::to_string(present.size()) + ")");
  }

  GroupSplit split = split_by_group(table, train_fraction, rng.derive(0));
  std::vector<Vector> train_x;
  std::vector<std::size_t> train_y;
  for (std::size_t i : split.train_rows) {
    train_x.push_back(table.features[i]);
    train_y.push_back(table.labels[i]);
  }
  forest::ForestModel detector =
      forest::fit_forest(train_x, train_y, params, rng.derive(1), classes);

  std::vector<std::size_t> predicted;
  std::vector<std::size_t> truth;
  for (std::size_t i : split.test_rows) {
    predicted.push_back(forest::predict_forest(detector, table.features[i]));
    truth.push_back(table.labels[i]);
  }

  QuestionReport report;
  report.question = question;
  report.labels = table.label_names;
  report.metrics = forest::compute_metrics(predicted, truth, classes);
  report.baseline = 1.0 / static_cast<double>(classes);
  report.train_support.assign(classes, 0);
  for (auto y : train_y) ++report.train_support[y];
  report.test_support = report.metrics.support;

  return {std::move(report), std::move(detector), std::move(table), std::move(split)};
}

DetectionResult q2_detect_adversarial(const std::vector<PredictionRecord>& records,
                                      const forest::ForestParams& params, double train_fraction,
                                      const Rng& rng) {
  if (records.empty()) throw std::invalid_argument("q2: no records");
  return run_detection("q2", build_q2_table(records), params, train_fraction, rng);
}

DetectionResult q3_model_attribution(const std::vector<PredictionRecord>& records,
                                     const forest::ForestParams& params, double train_fraction,
                                     const Rng& rng, bool include_failed) {
  if (records.empty()) throw std::invalid_argument("q3: no records");
  const std::size_t width = records.front().adv_output.size();
  for (const auto& r : records) {
    if (r.adv_output.size() != width) {
      throw std::invalid_argument("q3: models disagree on class count");
    }
  }
  if (sorted_model_ids(records).size() < 2) {
    throw std::invalid_argument("q3: records come from a single model");
  }
  return run_detection("q3", build_q3_table(records, include_failed), params, train_fraction,
                       rng);
}

DetectionResult q4_attack_attribution(const std::vector<PredictionRecord>& records,
                                      const forest::ForestParams& params, double train_fraction,
                                      const Rng& rng, bool include_failed) {
  if (records.empty()) throw std::invalid_argument("q4: no records");
  if (present_families(records).size() < 2) {
    throw std::invalid_argument("q4: records contain a single attack family");
  }
  return run_detection("q4", build_q4_table(records, include_failed), params, train_fraction,
                       rng);
}

// ---------------------------------------------------------------------------

std::string accuracy_report_to_json(const AccuracyReport& report) {
  ordered_json doc;
  doc["question"] = "q1";
  doc["labels"] = report.models;
  std::vector<std::string> attack_names;
  for (auto a : report.attacks) attack_names.emplace_back(attacks::to_string(a));
  doc["attacks"] = attack_names;
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"model", c.model_id},
                     {"attack", attacks::to_string(c.attack)},
                     {"samples", c.samples},
                     {"clean_accuracy", c.clean_accuracy},
                     {"adversarial_accuracy", c.adversarial_accuracy},
                     {"success_rate", c.success_rate}});
  }
  doc["cells"] = std::move(cells);
  ordered_json per_model = ordered_json::object();
  for (const auto& model : report.models) {
    const auto& s = report.per_model.at(model);
    ordered_json entry = {{"clean_avg", s.clean_avg},
                          {"adversarial_avg", s.adversarial_avg},
                          {"clean_std", s.clean_std},
                          {"adversarial_std", s.adversarial_std}};
    if (auto it = report.clean_test_accuracy.find(model); it != report.clean_test_accuracy.end()) {
      entry["clean_test_accuracy"] = it->second;
    }
    per_model[model] = std::move(entry);
  }
  doc["per_model"] = std::move(per_model);
  doc["baseline"] = report.baseline;
  return doc.dump(2) + "\n";
}

std::string accuracy_report_to_csv(const AccuracyReport& report) {
  std::ostringstream out;
  out << "model,attack,samples,clean_accuracy,adversarial_accuracy,success_rate\n";
  for (const auto& c : report.cells) {
    out << c.model_id << ',' << attacks::to_string(c.attack) << ',' << c.samples << ','
        << format_double(c.clean_accuracy) << ',' << format_double(c.adversarial_accuracy) << ','
        << format_double(c.success_rate) << '\n';
  }
  return out.str();
}

std::string question_report_to_json(const QuestionReport& report) {
  const auto& m = report.metrics;
  ordered_json doc;
  doc["question"] = report.question;
  doc["labels"] = report.labels;
  ordered_json per_label = ordered_json::object();
  for (std::size_t k = 0; k < report.labels.size(); ++k) {
    per_label[report.labels[k]] = {{"precision", m.precision[k]},
                                   {"recall", m.recall[k]},
                                   {"f1", m.f1[k]},
                                   {"support", m.support[k]},
                                   {"train_support", report.train_support[k]}};
  }
  doc["per_label"] = std::move(per_label);
  // "precision" here is the unweighted class mean, reported as mAP in the
  // literature these tables follow.
  doc["macro"] = {{"precision", m.macro_precision}, {"recall", m.macro_recall}, {"f1", m.macro_f1}};
  doc["accuracy"] = m.accuracy;
  doc["confusion"] = m.confusion;
  doc["baseline"] = report.baseline;
  return doc.dump(2) + "\n";
}

std::string question_report_to_csv(const QuestionReport& report) {
  const auto& m = report.metrics;
  std::ostringstream out;
  out << "label,precision,recall,f1,support,baseline\n";
  for (std::size_t k = 0; k < report.labels.size(); ++k) {
    out << report.labels[k] << ',' << format_double(m.precision[k]) << ','
        << format_double(m.recall[k]) << ',' << format_double(m.f1[k]) << ',' << m.support[k]
        << ',' << format_double(report.baseline) << '\n';
  }
  out << "macro," << format_double(m.macro_precision) << ',' << format_double(m.macro_recall)
      << ',' << format_double(m.macro_f1) << ','
      << std::accumulate(m.support.begin(), m.support.end(), std::size_t{0}) << ','
      << format_double(report.baseline) << '\n';
  return out.str();
}

}  // namespace advf::pipeline
