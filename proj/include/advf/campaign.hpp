#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "advf/config.hpp"
#include "advf/nn.hpp"
#include "advf/records.hpp"

namespace advf::pipeline {

/// "mlp-32x32" style id for a hidden-layer list.
std::string model_id_for(const std::vector<std::size_t>& hidden);

/// One model per architecture, trained on the same data with its own seed
/// (rng.derive(architecture index)). Throws if a model diverges or does not
/// beat chance on its training data; the message names the architecture.
std::vector<nn::NeuralModel> build_zoo(const CampaignConfig& cfg,
                                       const std::vector<nn::Sample>& train, const Rng& rng);

/// Test-set indices attacked by every (model, attack) pair, ascending.
std::vector<std::size_t> select_samples(std::size_t test_size, std::size_t count, const Rng& rng);

/// Raised when an attack fails inside the campaign; carries the task context.
class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every (model, attack, selected sample) triple, sorted by record_less.
std::vector<PredictionRecord> run_campaign(const CampaignConfig& cfg,
                                           const std::vector<nn::NeuralModel>& zoo,
                                           const std::vector<nn::Sample>& test, const Rng& rng);

}  // namespace advf::pipeline
