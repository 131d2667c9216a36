#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "advf/nn.hpp"
#include "advf/numcore.hpp"

namespace advf::attacks {

enum class Family { FGSM, FGM, PGD, LinfPGD, L2PGD, L2DeepFool };

const char* to_string(Family family);
/// Throws std::invalid_argument for unknown names.
Family family_from_string(const std::string& name);
const std::vector<Family>& all_families();

struct AttackConfig {
  Family family = Family::FGSM;
  Norm norm = Norm::Linf;
  double epsilon = 0.03;
  std::size_t steps = 1;
  /// 0 selects the default (2.5·ε/steps for PGD); ignored by other families.
  double step_size = 0.0;
  /// DeepFool only.
  double overshoot = 0.02;
  /// FGSM: bisect for the smallest ε ≤ epsilon that flips the prediction.
  bool minimal_epsilon = false;
  double bisection_tolerance = 1e-4;
  /// PGD: start from a uniform point in the ε-ball instead of x₀.
  bool random_start = false;
  std::uint64_t random_start_seed = 0;

  /// Hyperparameters of the reference experiment for `family`.
  static AttackConfig defaults(Family family);
  /// Throws std::invalid_argument when the fields are inconsistent.
  void validate() const;
  double effective_step_size() const;
};

struct AttackResult {
  Vector x_adv;
  std::size_t iterations_used = 0;
  bool success = false;
  /// ‖x_adv − x₀‖ under the config's norm.
  double perturbation_norm = 0.0;
};

/// Nearest point to delta inside the ε-ball.
Vector project(const Vector& delta, double epsilon, Norm order);

AttackResult fgsm(const nn::NeuralModel& model, const nn::Sample& s, const AttackConfig& cfg);
AttackResult fgm(const nn::NeuralModel& model, const nn::Sample& s, const AttackConfig& cfg);
AttackResult pgd(const nn::NeuralModel& model, const nn::Sample& s, const AttackConfig& cfg);
AttackResult deepfool_l2(const nn::NeuralModel& model, const nn::Sample& s,
                         const AttackConfig& cfg);

AttackResult run_attack(const AttackConfig& cfg, const nn::NeuralModel& model,
                        const nn::Sample& s);

}  // namespace advf::attacks
