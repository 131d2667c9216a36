#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "advf/attacks.hpp"
#include "advf/dataset.hpp"
#include "advf/forest.hpp"
#include "advf/nn.hpp"

namespace advf::pipeline {

struct ZooSpec {
  /// Hidden-layer widths per architecture.
  std::vector<std::vector<std::size_t>> architectures = {{32}, {64}, {32, 32}, {64, 32}};
  nn::TrainOptions training;
};

struct CampaignConfig {
  DatasetSpec dataset;
  ZooSpec zoo;
  std::vector<attacks::AttackConfig> attacks;
  forest::ForestParams detector;
  std::uint64_t seed = 20210801;
  std::size_t samples_per_attack = 100;
  /// Fraction of sample ids used to fit detectors.
  double train_fraction = 0.7;
  /// Q3/Q4 normally use successful attacks only.
  bool include_failed_attacks = false;

  /// Six attack families at their reference hyperparameters.
  static CampaignConfig defaults();
  void validate() const;
};

/// Config problems; `where()` names the offending field or a line:column.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Parses the JSON config (sections dataset/zoo/attacks/detector/run).
/// Absent fields keep their defaults; unknown keys are errors.
CampaignConfig parse_config(const std::string& text);
CampaignConfig load_config(const std::filesystem::path& path);
/// Full, explicit JSON rendering of a config (the manifest snapshot).
std::string config_to_json(const CampaignConfig& cfg);

}  // namespace advf::pipeline
