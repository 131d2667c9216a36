#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "advf/campaign.hpp"
#include "advf/config.hpp"
#include "advf/dataset.hpp"
#include "advf/forest.hpp"
#include "advf/questions.hpp"
#include "advf/records.hpp"
#include "advf/serialize.hpp"
#include "json.hpp"

namespace advf::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDatasetStream = 1;
constexpr std::uint64_t kZooStream = 2;
constexpr std::uint64_t kCampaignStream = 3;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Records stage outcomes and artifacts; always able to flush a manifest.
class Manifest {
 public:
  Manifest(fs::path out_dir, std::string command)
      : out_dir_(std::move(out_dir)), command_(std::move(command)) {}

  void set_config(const pipeline::CampaignConfig& cfg) {
    config_ = json::parse(pipeline::config_to_json(cfg));
    seed_ = cfg.seed;
  }

  void artifact(const fs::path& path) { artifacts_.push_back(path.lexically_relative(out_dir_)); }

  // Runs one stage; on failure records the error and rethrows.
  void stage(const std::string& name, const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    ordered_json entry = {{"name", name}};
    try {
      body();
      entry["status"] = "ok";
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      failed_stage_ = name;
      entry["wall_seconds"] = seconds_since(start);
      stages_.push_back(std::move(entry));
      throw;
    }
    entry["wall_seconds"] = seconds_since(start);
    stages_.push_back(std::move(entry));
  }

  const std::string& failed_stage() const { return failed_stage_; }

  void write() const {
    ordered_json doc;
    doc["tool"] = "advforensics";
    doc["version"] = ADVF_VERSION;
    doc["command"] = command_;
    doc["status"] = failed_stage_.empty() ? "ok" : "failed";
    if (seed_) doc["seed"] = *seed_;
    if (!config_.is_null()) doc["config"] = config_;
    std::vector<std::string> paths;
    for (const auto& p : artifacts_) paths.push_back(p.generic_string());
    paths.push_back(kManifestFile);
    doc["artifacts"] = paths;
    doc["stages"] = stages_;
    write_file(out_dir_ / kManifestFile, doc.dump(2) + "\n");
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  fs::path out_dir_;
  std::string command_;
  std::optional<std::uint64_t> seed_;
  ordered_json config_;
  std::vector<fs::path> artifacts_;
  ordered_json stages_ = ordered_json::array();
  std::string failed_stage_;
};

pipeline::DetectionResult detect(const std::string& question,
                                 const std::vector<pipeline::PredictionRecord>& records,
                                 const pipeline::CampaignConfig& cfg) {
  const Rng rng = Rng(cfg.seed).derive(question_seed_index(question));
  if (question == "q2") {
    return pipeline::q2_detect_adversarial(records, cfg.detector, cfg.train_fraction, rng);
  }
  if (question == "q3") {
    return pipeline::q3_model_attribution(records, cfg.detector, cfg.train_fraction, rng,
                                          cfg.include_failed_attacks);
  }
  if (question == "q4") {
    return pipeline::q4_attack_attribution(records, cfg.detector, cfg.train_fraction, rng,
                                           cfg.include_failed_attacks);
  }
  throw std::invalid_argument("unknown question '" + question + "' (expected q2, q3 or q4)");
}

void write_question(const fs::path& out_dir, const pipeline::QuestionReport& report,
                    Manifest* manifest) {
  const std::string stem = report_stem(report.question);
  write_file(out_dir / (stem + ".json"), pipeline::question_report_to_json(report));
  write_file(out_dir / (stem + ".csv"), pipeline::question_report_to_csv(report));
  if (manifest) {
    manifest->artifact(out_dir / (stem + ".json"));
    manifest->artifact(out_dir / (stem + ".csv"));
  }
}

}  // namespace

std::string report_stem(const std::string& question) {
  static const std::map<std::string, std::string> stems = {
      {"q1", "q1_attack_accuracy"},
      {"q2", "q2_detect_adversarial"},
      {"q3", "q3_model_attribution"},
      {"q4", "q4_attack_attribution"},
  };
  auto it = stems.find(question);
  if (it == stems.end()) throw std::invalid_argument("unknown question '" + question + "'");
  return it->second;
}

std::uint64_t question_seed_index(const std::string& question) {
  if (question == "q2") return 12;
  if (question == "q3") return 13;
  if (question == "q4") return 14;
  throw std::invalid_argument("unknown question '" + question + "'");
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            std::optional<std::uint64_t> seed_override) {
  pipeline::CampaignConfig cfg;
  try {
    cfg = config_path.empty() ? pipeline::CampaignConfig::defaults()
                              : pipeline::load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
  } catch (const pipeline::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  std::error_code ec;
  fs::create_directories(out_dir / "models", ec);
  if (ec) {
    std::cerr << "cannot create '" << out_dir.string() << "': " << ec.message() << "\n";
    return kRuntimeFailure;
  }

  Manifest manifest(out_dir, "run");
  manifest.set_config(cfg);
  const Rng master(cfg.seed);

  try {
    pipeline::Dataset data;
    std::vector<nn::NeuralModel> zoo;
    std::vector<pipeline::PredictionRecord> records;

    manifest.stage("generate_dataset", [&] {
      Rng rng = master.derive(kDatasetStream);
      data = pipeline::generate_dataset(cfg.dataset, rng);
    });

    manifest.stage("build_zoo", [&] {
      zoo = pipeline::build_zoo(cfg, data.train, master.derive(kZooStream));
      for (const auto& model : zoo) {
        const fs::path path = out_dir / "models" / (model.id() + ".json");
        write_file(path, model_to_json(model) + "\n");
        manifest.artifact(path);
      }
    });

    manifest.stage("run_campaign", [&] {
      records = pipeline::run_campaign(cfg, zoo, data.test, master.derive(kCampaignStream));
      pipeline::save_records(out_dir / kRecordsFile, records);
      std::ofstream csv(out_dir / kRecordsCsvFile, std::ios::binary | std::ios::trunc);
      pipeline::write_records_csv(csv, records);
      if (!csv) throw std::runtime_error("failed writing records.csv");
      manifest.artifact(out_dir / kRecordsFile);
      manifest.artifact(out_dir / kRecordsCsvFile);
    });

    manifest.stage("q1_attack_accuracy", [&] {
      std::map<std::string, double> clean_eval;
      for (const auto& model : zoo) clean_eval[model.id()] = nn::accuracy(model, data.test);
      const auto report = pipeline::q1_attack_accuracy(records, clean_eval);
      const std::string stem = report_stem("q1");
      write_file(out_dir / (stem + ".json"), pipeline::accuracy_report_to_json(report));
      write_file(out_dir / (stem + ".csv"), pipeline::accuracy_report_to_csv(report));
      manifest.artifact(out_dir / (stem + ".json"));
      manifest.artifact(out_dir / (stem + ".csv"));
    });

    for (const std::string question : {"q2", "q3", "q4"}) {
      manifest.stage(report_stem(question), [&] {
        auto result = detect(question, records, cfg);
        write_question(out_dir, result.report, &manifest);
        if (question == "q2") {
          std::vector<Vector> batch;
          for (std::size_t i : result.split.test_rows) batch.push_back(result.table.features[i]);
          const auto latency = forest::latency_probe(result.detector, batch);
          ordered_json doc = {{"detector", "q2"},
                              {"trees", result.detector.trees().size()},
                              {"predictions", latency.predictions},
                              {"mean_ms", latency.mean_seconds * 1e3}};
          write_file(out_dir / kLatencyFile, doc.dump(2) + "\n");
          manifest.artifact(out_dir / kLatencyFile);
        }
      });
    }
  } catch (const std::exception& e) {
    std::cerr << "stage " << manifest.failed_stage() << " failed: " << e.what() << "\n";
    try {
      manifest.write();
    } catch (const std::exception& inner) {
      std::cerr << "could not write manifest: " << inner.what() << "\n";
    }
    return kRuntimeFailure;
  }

  try {
    manifest.write();
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

int cmd_detect(const fs::path& records_path, const std::string& question, const fs::path& out_dir,
               std::optional<std::uint64_t> seed, const fs::path& config_path) {
  pipeline::CampaignConfig cfg;
  try {
    cfg = config_path.empty() ? pipeline::CampaignConfig::defaults()
                              : pipeline::load_config(config_path);
    if (seed) cfg.seed = *seed;
    report_stem(question);
    question_seed_index(question);
  } catch (const pipeline::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto records = pipeline::load_records(records_path);
    if (records.empty()) throw std::runtime_error("record store is empty");
    fs::create_directories(out_dir);
    const auto result = detect(question, records, cfg);
    write_question(out_dir, result.report, nullptr);
  } catch (const pipeline::RecordParseError& e) {
    std::cerr << records_path.string() << ": malformed record at " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "detect " << question << " failed: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

namespace {

struct FigureRow {
  std::string label;
  std::string metric;
  double value;
  double baseline;
};

void write_figure(const fs::path& path, const std::vector<FigureRow>& rows) {
  std::ostringstream out;
  out << "label,metric,value,baseline\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.metric << ',' << pipeline::format_double(r.value) << ','
        << pipeline::format_double(r.baseline) << '\n';
  }
  write_file(path, out.str());
}

std::vector<FigureRow> question_figure(const json& doc) {
  std::vector<FigureRow> rows;
  const double baseline = doc.at("baseline").get<double>();
  for (const auto& label : doc.at("labels")) {
    const auto& entry = doc.at("per_label").at(label.get<std::string>());
    for (const char* metric : {"precision", "recall", "f1"}) {
      rows.push_back({label.get<std::string>(), metric, entry.at(metric).get<double>(), baseline});
    }
  }
  return rows;
}

std::vector<FigureRow> accuracy_figure(const json& doc) {
  std::vector<FigureRow> rows;
  const double baseline = doc.at("baseline").get<double>();
  for (const auto& cell : doc.at("cells")) {
    const std::string label =
        cell.at("model").get<std::string>() + "/" + cell.at("attack").get<std::string>();
    rows.push_back({label, "clean_accuracy", cell.at("clean_accuracy").get<double>(), baseline});
    rows.push_back(
        {label, "adversarial_accuracy", cell.at("adversarial_accuracy").get<double>(), baseline});
  }
  return rows;
}

}  // namespace

int cmd_report(const fs::path& out_dir) {
  const std::vector<std::pair<std::string, std::string>> figures = {
      {"q1", "fig2_attack_accuracy.csv"},
      {"q2", "fig3_adversarial_input.csv"},
      {"q3", "fig4_model_attacked.csv"},
      {"q4", "fig5_attack_type.csv"},
  };
  try {
    std::vector<std::pair<fs::path, std::vector<FigureRow>>> pending;
    for (const auto& [question, file] : figures) {
      const fs::path report = out_dir / (report_stem(question) + ".json");
      if (!fs::exists(report)) throw std::runtime_error("missing report " + report.string());
      const json doc = json::parse(read_file(report));
      pending.emplace_back(out_dir / file,
                           question == "q1" ? accuracy_figure(doc) : question_figure(doc));
    }
    for (const auto& [path, rows] : pending) write_figure(path, rows);
  } catch (const std::exception& e) {
    std::cerr << "report failed: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace advf::cli
