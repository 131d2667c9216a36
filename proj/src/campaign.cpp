#include "advf/campaign.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "advf/parallel.hpp"

namespace advf::pipeline {

std::string model_id_for(const std::vector<std::size_t>& hidden) {
  std::string id = "mlp";
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    id += (i == 0 ? "-" : "x") + std::to_string(hidden[i]);
  }
  return id;
}

std::vector<nn::NeuralModel> build_zoo(const CampaignConfig& cfg,
                                       const std::vector<nn::Sample>& train, const Rng& rng) {
  const auto& archs = cfg.zoo.architectures;
  if (archs.size() < 2) throw std::invalid_argument("build_zoo: need at least two architectures");

  std::vector<std::string> ids;
  std::set<std::string> taken;
  for (std::size_t i = 0; i < archs.size(); ++i) {
    std::string id = model_id_for(archs[i]);
    if (taken.count(id)) id += "-" + std::to_string(i);
    taken.insert(id);
    ids.push_back(std::move(id));
  }

  std::vector<nn::NeuralModel> zoo(archs.size());
  parallel_for(archs.size(), [&](std::size_t i) {
    Rng model_rng = rng.derive(i);
    try {
      zoo[i] = nn::train(ids[i], archs[i], train, cfg.zoo.training, model_rng,
                         cfg.dataset.class_count);
    } catch (const std::exception& e) {
      throw std::runtime_error("architecture " + ids[i] + ": " + e.what());
    }
    const double chance = 1.0 / static_cast<double>(zoo[i].class_count());
    if (!(nn::accuracy(zoo[i], train) > chance)) {
      throw std::runtime_error("architecture " + ids[i] + " did not train above chance");
    }
  });
  return zoo;
}

std::vector<std::size_t> select_samples(std::size_t test_size, std::size_t count, const Rng& rng) {
  if (count > test_size) {
    throw std::invalid_argument("cannot select " + std::to_string(count) + " of " +
                                std::to_string(test_size) + " test samples");
  }
  std::vector<std::size_t> ids(test_size);
  std::iota(ids.begin(), ids.end(), 0);
  Rng local = rng;
  local.shuffle(ids);
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<PredictionRecord> run_campaign(const CampaignConfig& cfg,
                                           const std::vector<nn::NeuralModel>& zoo,
                                           const std::vector<nn::Sample>& test, const Rng& rng) {
  if (zoo.empty()) throw std::invalid_argument("run_campaign: empty zoo");
  if (test.empty()) throw std::invalid_argument("run_campaign: empty test data");
  if (cfg.attacks.empty()) throw std::invalid_argument("run_campaign: no attacks configured");

  const auto sample_ids = select_samples(test.size(), cfg.samples_per_attack, rng.derive(0));

  // Clean outputs once per (model, sample).
  const std::size_t n_samples = sample_ids.size();
  std::vector<Vector> clean(zoo.size() * n_samples);
  parallel_for(clean.size(), [&](std::size_t i) {
    clean[i] = zoo[i / n_samples].forward(test[sample_ids[i % n_samples]].x0);
  });

  const std::size_t per_model = cfg.attacks.size() * n_samples;
  std::vector<PredictionRecord> records(zoo.size() * per_model);
  parallel_for(records.size(), [&](std::size_t task) {
    const std::size_t m = task / per_model;
    const std::size_t a = (task % per_model) / n_samples;
    const std::size_t s = task % n_samples;
    const auto& model = zoo[m];
    const auto& sample = test[sample_ids[s]];
    auto attack = cfg.attacks[a];
    if (attack.random_start) attack.random_start_seed = Rng::derive_seed(rng.seed(), 1000 + task);

    try {
      auto result = attacks::run_attack(attack, model, sample);
      PredictionRecord& r = records[task];
      r.sample_id = sample_ids[s];
      r.clean_input = sample.x0;
      r.clean_output = clean[m * n_samples + s];
      r.adv_output = model.forward(result.x_adv);
      r.adv_input = std::move(result.x_adv);
      r.truth = sample.label;
      r.attack_success = argmax(r.adv_output.view()) != sample.label;
      r.model_id = model.id();
      r.attack_id = attack.family;
    } catch (const std::exception& e) {
      throw CampaignError("model '" + model.id() + "', attack '" +
                          attacks::to_string(attack.family) + "', sample " +
                          std::to_string(sample_ids[s]) + ": " + e.what());
    }
  });

  std::sort(records.begin(), records.end(), record_less);
  return records;
}

}  // namespace advf::pipeline
