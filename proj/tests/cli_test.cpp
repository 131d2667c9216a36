#include "cli.hpp"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advf/records.hpp"
#include "gtest/gtest.h"
#include "json.hpp"

namespace advf::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSmallConfig = R"({
  "dataset": {"dimension": 8, "class_count": 3, "train_samples": 300, "test_samples": 100},
  "zoo": {"architectures": [[8], [16]], "epochs": 20},
  "attacks": [
    {"family": "FGSM", "epsilon": 0.2},
    {"family": "L2PGD", "epsilon": 1.0}
  ],
  "detector": {"tree_count": 20},
  "run": {"seed": 5, "samples_per_attack": 40}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() / ("advf_cli_" + std::to_string(getpid())));
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    spit(config(), kSmallConfig);
    run_exit_ = cmd_run(config(), run_dir(), std::nullopt);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }

  static fs::path config() { return *root_ / "small.json"; }
  static fs::path run_dir() { return *root_ / "run"; }
  static fs::path scratch(const std::string& name) { return *root_ / name; }

  static fs::path* root_;
  static int run_exit_;
};

fs::path* CliTest::root_ = nullptr;
int CliTest::run_exit_ = -1;

TEST_F(CliTest, RunWritesEveryArtifact) {
  ASSERT_EQ(run_exit_, kOk);
  for (const char* name :
       {"records.jsonl", "records.csv", "manifest.json", "latency.json", "models/mlp-8.json",
        "models/mlp-16.json", "q1_attack_accuracy.json", "q1_attack_accuracy.csv",
        "q2_detect_adversarial.json", "q2_detect_adversarial.csv", "q3_model_attribution.json",
        "q3_model_attribution.csv", "q4_attack_attribution.json", "q4_attack_attribution.csv"}) {
    EXPECT_TRUE(fs::exists(run_dir() / name)) << name;
  }
  const json manifest = json::parse(slurp(run_dir() / kManifestFile));
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["seed"], 5);
  EXPECT_EQ(manifest["stages"].size(), 7u);
  for (const auto& stage : manifest["stages"]) EXPECT_EQ(stage["status"], "ok");
  EXPECT_EQ(manifest["config"]["dataset"]["dimension"], 8);

  const auto records = pipeline::load_records(run_dir() / kRecordsFile);
  EXPECT_EQ(records.size(), 2u * 2u * 40u);
  EXPECT_EQ(line_count(slurp(run_dir() / kRecordsCsvFile)), records.size() + 1);
}

TEST_F(CliTest, SeedOverrideChangesRecords) {
  const fs::path out = scratch("seed9");
  ASSERT_EQ(cmd_run(config(), out, 9), kOk);
  EXPECT_NE(slurp(out / kRecordsFile), slurp(run_dir() / kRecordsFile));
  EXPECT_EQ(json::parse(slurp(out / kManifestFile))["seed"], 9);
}

TEST_F(CliTest, ConfigErrorExitsWithTwo) {
  const fs::path bad = scratch("bad.json");
  spit(bad, R"({"zoo": {"epochs": 5, "momentum": 0.9}})");
  testing::internal::CaptureStderr();
  EXPECT_EQ(cmd_run(bad, scratch("bad_out"), std::nullopt), kConfigError);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("zoo.momentum"), std::string::npos) << err;
  EXPECT_EQ(cmd_run(scratch("does_not_exist.json"), scratch("bad_out"), std::nullopt),
            kConfigError);
}

TEST_F(CliTest, TrainingDivergenceExitsWithOneAndRecordsStage) {
  const fs::path cfg = scratch("diverge.json");
  json doc = json::parse(kSmallConfig);
  doc["zoo"]["learning_rate"] = 1e300;
  spit(cfg, doc.dump());
  const fs::path out = scratch("diverge_out");
  testing::internal::CaptureStderr();
  EXPECT_EQ(cmd_run(cfg, out, std::nullopt), kRuntimeFailure);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("mlp-8"), std::string::npos) << err;
  const json manifest = json::parse(slurp(out / kManifestFile));
  EXPECT_EQ(manifest["status"], "failed");
  const auto& last = manifest["stages"].back();
  EXPECT_EQ(last["name"], "build_zoo");
  EXPECT_EQ(last["status"], "failed");
}

TEST_F(CliTest, DetectReproducesRunReport) {
  const fs::path out = scratch("detect_q2");
  ASSERT_EQ(cmd_detect(run_dir() / kRecordsFile, "q2", out, std::nullopt, config()), kOk);
  EXPECT_EQ(slurp(out / "q2_detect_adversarial.json"),
            slurp(run_dir() / "q2_detect_adversarial.json"));
  EXPECT_EQ(slurp(out / "q2_detect_adversarial.csv"),
            slurp(run_dir() / "q2_detect_adversarial.csv"));
}

TEST_F(CliTest, DetectOnSingleFamilyStoreFails) {
  auto records = pipeline::load_records(run_dir() / kRecordsFile);
  std::erase_if(records, [](const auto& r) { return r.attack_id != attacks::Family::FGSM; });
  const fs::path store = scratch("fgsm_only.jsonl");
  pipeline::save_records(store, records);
  testing::internal::CaptureStderr();
  EXPECT_EQ(cmd_detect(store, "q4", scratch("q4_out"), std::nullopt), kRuntimeFailure);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("single attack family"), std::string::npos) << err;
}

TEST_F(CliTest, DetectReportsMalformedLine) {
  std::istringstream in(slurp(run_dir() / kRecordsFile));
  std::string first;
  std::getline(in, first);
  const fs::path store = scratch("broken.jsonl");
  spit(store, first + "\n" + first + "\n{not json\n");
  testing::internal::CaptureStderr();
  EXPECT_EQ(cmd_detect(store, "q2", scratch("broken_out"), std::nullopt), kRuntimeFailure);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("line 3"), std::string::npos) << err;
}

TEST_F(CliTest, DetectRejectsUnknownQuestion) {
  testing::internal::CaptureStderr();
  EXPECT_EQ(cmd_detect(run_dir() / kRecordsFile, "q7", scratch("q7"), std::nullopt), kConfigError);
  testing::internal::GetCapturedStderr();
}

TEST_F(CliTest, ReportWritesFigureTables) {
  const fs::path out = scratch("report");
  fs::create_directories(out);
  for (const auto& entry : fs::directory_iterator(run_dir())) {
    if (entry.path().extension() == ".json") fs::copy_file(entry.path(), out / entry.path().filename());
  }
  ASSERT_EQ(cmd_report(out), kOk);

  // (file, expected baseline, label count, metrics per label)
  struct Expect {
    const char* file;
    double baseline;
    std::size_t labels;
    std::size_t metrics;
  };
  for (const auto& e : {Expect{"fig2_attack_accuracy.csv", 1.0 / 3.0, 4, 2},
                        Expect{"fig3_adversarial_input.csv", 0.5, 2, 3},
                        Expect{"fig4_model_attacked.csv", 0.5, 2, 3},
                        Expect{"fig5_attack_type.csv", 0.5, 2, 3}}) {
    std::istringstream in(slurp(out / e.file));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "label,metric,value,baseline");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      const double baseline = std::stod(line.substr(line.rfind(',') + 1));
      EXPECT_NEAR(baseline, e.baseline, 1e-15) << e.file;
    }
    EXPECT_EQ(rows, e.labels * e.metrics) << e.file;
  }
}

TEST_F(CliTest, ReportWithoutReportsFails) {
  const fs::path out = scratch("empty_report");
  fs::create_directories(out);
  testing::internal::CaptureStderr();
  EXPECT_EQ(cmd_report(out), kRuntimeFailure);
  testing::internal::GetCapturedStderr();
}

TEST(CliBinaryTest, ParseErrorsExitWithTwo) {
  const std::string bin = ADVF_CLI_PATH;
  auto exit_of = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(exit_of("--help"), 0);
  EXPECT_EQ(exit_of("--version"), 0);
  EXPECT_EQ(exit_of("frobnicate"), 2);
  EXPECT_EQ(exit_of("detect --records x.jsonl --question q9 --out /tmp"), 2);
}

}  // namespace
}  // namespace advf::cli
