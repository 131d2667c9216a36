#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace advf::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kConfigError = 2 };

/// Artifact names inside an output directory.
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kRecordsCsvFile = "records.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kLatencyFile = "latency.json";

/// Report file stem for q1..q4, e.g. "q2_detect_adversarial".
std::string report_stem(const std::string& question);

/// Derived-seed index of each detection question under the master seed.
std::uint64_t question_seed_index(const std::string& question);

/// Dataset → zoo → campaign → Q1-Q4 → reports. An empty config path runs the
/// built-in defaults.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed_override);

/// Re-runs one detection question (q2, q3 or q4) from a record store.
/// Detector settings come from `config_path` when given, else defaults.
int cmd_detect(const std::filesystem::path& records_path, const std::string& question,
               const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
               const std::filesystem::path& config_path = {});

/// Plot-ready CSVs (label, metric, value, baseline) for the four figures.
int cmd_report(const std::filesystem::path& out_dir);

}  // namespace advf::cli
