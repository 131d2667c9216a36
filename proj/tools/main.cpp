#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adversarial attack campaigns and output-vector forensics"};
  app.set_version_flag("--version", ADVF_VERSION);
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string records;
  std::string question;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Train the zoo, run the attack campaign, answer Q1-Q4");
  run->add_option("--config", config, "JSON config (defaults when omitted)");
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--seed", seed, "Override the master seed");

  auto* detect = app.add_subcommand("detect", "Re-run one detection question from records");
  detect->add_option("--records", records, "records.jsonl from a previous run")->required();
  detect->add_option("--question", question, "q2, q3 or q4")
      ->required()
      ->check(CLI::IsMember({"q2", "q3", "q4"}));
  detect->add_option("--out", out, "Output directory")->required();
  detect->add_option("--seed", seed, "Master seed");
  detect->add_option("--config", config, "Config providing detector settings");

  auto* report = app.add_subcommand("report", "Write figure CSVs from existing reports");
  report->add_option("--out", out, "Directory holding the question reports")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : advf::cli::kConfigError;
  }

  if (*run) return advf::cli::cmd_run(config, out, seed);
  if (*detect) return advf::cli::cmd_detect(records, question, out, seed, config);
  if (*report) return advf::cli::cmd_report(out);
  return advf::cli::kConfigError;
}
