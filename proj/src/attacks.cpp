#include "advf/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace advf::attacks {

namespace {

struct FamilyName {
  Family family;
  const char* name;
};

constexpr FamilyName kFamilyNames[] = {
    {Family::FGSM, "FGSM"},       {Family::FGM, "FGM"},     {Family::PGD, "PGD"},
    {Family::LinfPGD, "LinfPGD"}, {Family::L2PGD, "L2PGD"}, {Family::L2DeepFool, "L2DeepFool"},
};

Norm required_norm(Family family) {
  switch (family) {
    case Family::FGSM:
    case Family::PGD:
    case Family::LinfPGD:
      return Norm::Linf;
    case Family::FGM:
    case Family::L2PGD:
    case Family::L2DeepFool:
      return Norm::L2;
  }
  throw std::invalid_argument("unknown attack family");
}

void check_sample(const nn::NeuralModel& model, const nn::Sample& s) {
  if (s.x0.size() != model.input_size()) {
    throw DimensionError("sample width " + std::to_string(s.x0.size()) + " does not match model '" +
                         model.id() + "' input width " + std::to_string(model.input_size()));
  }
  if (s.label >= model.class_count()) {
    throw DimensionError("sample label out of range for model '" + model.id() + "'");
  }
}

AttackResult finish(const nn::NeuralModel& model, const nn::Sample& s, Vector x_adv,
                    std::size_t iterations, Norm order) {
  AttackResult r;
  r.perturbation_norm = norm(x_adv - s.x0, order);
  r.success = model.predict_class(x_adv) != s.label;
  r.iterations_used = iterations;
  r.x_adv = std::move(x_adv);
  return r;
}

// x₀ + project(x − x₀), then the [0,1] box.
Vector project_and_clamp(const Vector& x, const Vector& x0, double epsilon, Norm order) {
  return clamp(x0 + project(x - x0, epsilon, order), 0.0, 1.0);
}

Vector unit_l2(const Vector& g) {
  const double n = norm(g, Norm::L2);
  if (n == 0.0) return Vector(g.size());
  return (1.0 / n) * g;
}

}  // namespace

const char* to_string(Family family) {
  for (const auto& entry : kFamilyNames) {
    if (entry.family == family) return entry.name;
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (const auto& entry : kFamilyNames) {
    if (name == entry.name) return entry.family;
  }
  throw std::invalid_argument("unknown attack family '" + name + "'");
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = {Family::FGM,     Family::FGSM,  Family::PGD,
                                               Family::LinfPGD, Family::L2PGD, Family::L2DeepFool};
  return families;
}

AttackConfig AttackConfig::defaults(Family family) {
  AttackConfig cfg;
  cfg.family = family;
  cfg.norm = required_norm(family);
  switch (family) {
    case Family::FGM:
      cfg.epsilon = 5.0;
      cfg.steps = 1;
      break;
    case Family::FGSM:
      cfg.epsilon = 0.03;
      cfg.steps = 1;
      break;
    case Family::PGD:
      cfg.epsilon = 0.03;
      cfg.steps = 10;
      break;
    case Family::LinfPGD:
      cfg.epsilon = 0.1;
      cfg.steps = 10;
      break;
    case Family::L2PGD:
      cfg.epsilon = 5.0;
      cfg.steps = 10;
      break;
    case Family::L2DeepFool:
      cfg.epsilon = 5.0;
      cfg.steps = 10;
      cfg.overshoot = 0.02;
      break;
  }
  return cfg;
}

void AttackConfig::validate() const {
  const std::string who = to_string(family);
  if (norm != required_norm(family)) {
    throw std::invalid_argument(who + " requires norm " + advf::to_string(required_norm(family)));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument(who + ": epsilon must be positive and finite");
  }
  if (steps == 0) throw std::invalid_argument(who + ": steps must be at least 1");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument(who + ": step_size must be non-negative");
  }
  if (!(overshoot >= 0.0) || !std::isfinite(overshoot)) {
    throw std::invalid_argument(who + ": overshoot must be non-negative");
  }
  if (minimal_epsilon && !(bisection_tolerance > 0.0)) {
    throw std::invalid_argument(who + ": bisection_tolerance must be positive");
  }
}

double AttackConfig::effective_step_size() const {
  if (step_size > 0.0) return step_size;
  return 2.5 * epsilon / static_cast<double>(steps);
}

Vector project(const Vector& delta, double epsilon, Norm order) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("project: epsilon must be positive");
  if (order == Norm::Linf) return clamp(delta, -epsilon, epsilon);
  const double n = norm(delta, Norm::L2);
  if (n <= epsilon) return delta;
  return (epsilon / n) * delta;
}

AttackResult fgsm(const nn::NeuralModel& model, const nn::Sample& s, const AttackConfig& cfg) {
  check_sample(model, s);
  const Vector direction = sign(model.input_gradient(s).g);
  auto step = [&](double eps) { return clamp(s.x0 + eps * direction, 0.0, 1.0); };

  if (!cfg.minimal_epsilon) return finish(model, s, step(cfg.epsilon), 1, Norm::Linf);

  // Smallest ε along the fixed sign direction that flips the prediction.
  if (model.predict_class(s.x0) != s.label) return finish(model, s, s.x0, 0, Norm::Linf);
  Vector at_max = step(cfg.epsilon);
  if (model.predict_class(at_max) == s.label) {
    return finish(model, s, std::move(at_max), 1, Norm::Linf);
  }
  double lo = 0.0;
  double hi = cfg.epsilon;
  std::size_t probes = 1;
  while (hi - lo > cfg.bisection_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (model.predict_class(step(mid)) != s.label ? hi : lo) = mid;
    ++probes;
  }
  return finish(model, s, step(hi), probes, Norm::Linf);
}

AttackResult fgm(const nn::NeuralModel& model, const nn::Sample& s, const AttackConfig& cfg) {
  check_sample(model, s);
  const Vector g = model.input_gradient(s).g;
  if (norm(g, Norm::L2) == 0.0) return finish(model, s, s.x0, 1, Norm::L2);
  return finish(model, s, clamp(s.x0 + cfg.epsilon * unit_l2(g), 0.0, 1.0), 1, Norm::L2);
}

AttackResult pgd(const nn::NeuralModel& model, const nn::Sample& s, const AttackConfig& cfg) {
  check_sample(model, s);
  if (cfg.family == Family::PGD && cfg.norm != Norm::Linf) {
    throw std::invalid_argument("PGD is the Linf variant");
  }
  const double alpha = cfg.effective_step_size();
  Vector x = s.x0;

  if (cfg.random_start) {
    Rng rng(cfg.random_start_seed);
    Vector delta(x.size());
    if (cfg.norm == Norm::Linf) {
      for (double& d : delta) d = rng.uniform(-cfg.epsilon, cfg.epsilon);
    } else {
      for (double& d : delta) d = rng.normal();
      const double radius =
          cfg.epsilon * std::pow(rng.uniform(), 1.0 / static_cast<double>(delta.size()));
      delta = radius * unit_l2(delta);
    }
    x = project_and_clamp(s.x0 + delta, s.x0, cfg.epsilon, cfg.norm);
  }

  for (std::size_t i = 0; i < cfg.steps; ++i) {
    const Vector g = model.input_gradient({x, s.label}).g;
    const Vector direction = cfg.norm == Norm::Linf ? sign(g) : unit_l2(g);
    x = project_and_clamp(x + alpha * direction, s.x0, cfg.epsilon, cfg.norm);
  }
  return finish(model, s, std::move(x), cfg.steps, cfg.norm);
}

AttackResult deepfool_l2(const nn::NeuralModel& model, const nn::Sample& s,
                         const AttackConfig& cfg) {
  check_sample(model, s);
  constexpr double kDegenerate = 1e-12;
  const std::size_t label = s.label;

  Vector x = s.x0;
  std::size_t iterations = 0;
  while (iterations < cfg.steps) {
    Vector logits;
    const Matrix jac = model.logit_jacobian(x, &logits);
    if (argmax(logits.view()) != label) break;

    double best_distance = std::numeric_limits<double>::infinity();
    Vector best_direction;
    const auto w0 = jac.row(label);
    for (std::size_t k = 0; k < model.class_count(); ++k) {
      if (k == label) continue;
      const auto wk = jac.row(k);
      Vector diff(wk.size());
      for (std::size_t j = 0; j < wk.size(); ++j) diff[j] = wk[j] - w0[j];
      const double denom = norm(diff, Norm::L2);
      if (denom < kDegenerate) continue;
      const double distance = std::abs(logits[k] - logits[label]) / denom;
      if (distance < best_distance) {
        best_distance = distance;
        best_direction = (1.0 / denom) * diff;
      }
    }
    if (best_direction.empty()) {
      // Every boundary is degenerate; no linear step exists.
      return finish(model, s, s.x0, iterations, Norm::L2);
    }
    x += ((1.0 + cfg.overshoot) * best_distance) * best_direction;
    ++iterations;
  }

  return finish(model, s, project_and_clamp(x, s.x0, cfg.epsilon, Norm::L2), iterations,
                Norm::L2);
}

AttackResult run_attack(const AttackConfig& cfg, const nn::NeuralModel& model,
                        const nn::Sample& s) {
  cfg.validate();
  switch (cfg.family) {
    case Family::FGSM:
      return fgsm(model, s, cfg);
    case Family::FGM:
      return fgm(model, s, cfg);
    case Family::PGD:
    case Family::LinfPGD:
    case Family::L2PGD:
      return pgd(model, s, cfg);
    case Family::L2DeepFool:
      return deepfool_l2(model, s, cfg);
  }
  throw std::invalid_argument("unknown attack family");
}

}  // namespace advf::attacks
