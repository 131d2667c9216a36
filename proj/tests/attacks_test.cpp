#include "advf/attacks.hpp"

#include <cmath>
#include <cstring>

#include "gtest/gtest.h"
#include "test_models.hpp"

namespace advf::attacks {
namespace {

using advf::testing::linear_model;
using advf::testing::random_unit_box;
using advf::testing::random_vector;

// Binary 1-D model: logit0 = 0, logit1 = w·x + b. With x0 = 0.5 and label 0
// the logit margin is m = −(0.5w + b).
nn::NeuralModel margin_model(double w, double margin) {
  return linear_model(Matrix(2, 1, {0.0, w}), Vector{0.0, -margin - 0.5 * w});
}

// Trained stand-in for a zoo member on a small 3-class problem.
struct SmallZoo {
  std::vector<nn::Sample> data;
  nn::NeuralModel model;
};

const SmallZoo& small_zoo() {
  static const SmallZoo zoo = [] {
    Rng rng(31);
    std::vector<nn::Sample> data;
    const Vector centers[] = {{0.3, 0.3, 0.5, 0.5}, {0.7, 0.3, 0.5, 0.5}, {0.5, 0.7, 0.5, 0.5}};
    for (int i = 0; i < 300; ++i) {
      const std::size_t label = i % 3;
      Vector x(4);
      for (std::size_t j = 0; j < 4; ++j) {
        x[j] = std::clamp(rng.normal(centers[label][j], 0.08), 0.0, 1.0);
      }
      data.push_back({std::move(x), label});
    }
    Rng train_rng(32);
    auto model = nn::train("small", {16}, data, nn::TrainOptions{40, 0.1, 16}, train_rng);
    return SmallZoo{std::move(data), std::move(model)};
  }();
  return zoo;
}

TEST(DefaultsTest, ReferenceHyperparameters) {
  const auto fgm_cfg = AttackConfig::defaults(Family::FGM);
  EXPECT_EQ(fgm_cfg.epsilon, 5.0);
  EXPECT_EQ(fgm_cfg.norm, Norm::L2);
  const auto fgsm_cfg = AttackConfig::defaults(Family::FGSM);
  EXPECT_EQ(fgsm_cfg.epsilon, 0.03);
  EXPECT_EQ(fgsm_cfg.norm, Norm::Linf);
  const auto pgd_cfg = AttackConfig::defaults(Family::PGD);
  EXPECT_EQ(pgd_cfg.epsilon, 0.03);
  EXPECT_EQ(pgd_cfg.steps, 10u);
  EXPECT_EQ(pgd_cfg.norm, Norm::Linf);
  const auto linf = AttackConfig::defaults(Family::LinfPGD);
  EXPECT_EQ(linf.epsilon, 0.1);
  EXPECT_EQ(linf.steps, 10u);
  const auto l2 = AttackConfig::defaults(Family::L2PGD);
  EXPECT_EQ(l2.epsilon, 5.0);
  EXPECT_EQ(l2.steps, 10u);
  EXPECT_EQ(l2.norm, Norm::L2);
  const auto df = AttackConfig::defaults(Family::L2DeepFool);
  EXPECT_EQ(df.epsilon, 5.0);
  EXPECT_EQ(df.steps, 10u);
  EXPECT_EQ(df.overshoot, 0.02);
  EXPECT_DOUBLE_EQ(linf.effective_step_size(), 2.5 * 0.1 / 10);
}

TEST(DefaultsTest, ValidationRejectsBadConfigs) {
  auto cfg = AttackConfig::defaults(Family::PGD);
  cfg.norm = Norm::L2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = AttackConfig::defaults(Family::FGM);
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = AttackConfig::defaults(Family::L2PGD);
  cfg.steps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(family_from_string("BIM"), std::invalid_argument);
  for (auto f : all_families()) EXPECT_EQ(family_from_string(to_string(f)), f);
}

TEST(ProjectTest, InsideBallUnchanged) {
  const Vector d{0.01, -0.02};
  EXPECT_EQ(project(d, 0.1, Norm::Linf), d);
  EXPECT_EQ(project(d, 0.1, Norm::L2), d);
}

TEST(ProjectTest, LinfClamps) {
  EXPECT_EQ(project(Vector{0.2, -0.5}, 0.1, Norm::Linf), (Vector{0.1, -0.1}));
}

TEST(ProjectTest, L2RescalesRadially) {
  const Vector d{6, 8};  // norm 10
  const Vector p = project(d, 5, Norm::L2);
  EXPECT_DOUBLE_EQ(p[0], 3.0);
  EXPECT_DOUBLE_EQ(p[1], 4.0);
}

TEST(ProjectTest, IdempotentAndInsideBall) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Vector d = random_vector(8, rng, 2.0);
    const double eps = rng.uniform(0.01, 3.0);
    for (Norm order : {Norm::L2, Norm::Linf}) {
      const Vector once = project(d, eps, order);
      const Vector twice = project(once, eps, order);
      EXPECT_LE(norm(once, order), eps * (1 + 1e-12));
      for (std::size_t j = 0; j < d.size(); ++j) EXPECT_NEAR(once[j], twice[j], 1e-15);
    }
  }
}

TEST(ProjectTest, RejectsNonPositiveEpsilon) {
  EXPECT_THROW(project(Vector{1, 2}, 0.0, Norm::L2), std::invalid_argument);
}

TEST(FgsmTest, ZeroGradientLeavesInputAlone) {
  // All-zero weights: uniform output, zero gradient; label 0 wins the tie.
  const auto model = linear_model(Matrix(2, 3), Vector(2));
  const nn::Sample s{Vector{0.2, 0.4, 0.6}, 0};
  const auto r = fgsm(model, s, AttackConfig::defaults(Family::FGSM));
  EXPECT_EQ(r.x_adv, s.x0);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.perturbation_norm, 0.0);
}

TEST(FgsmTest, LinearMarginOracle) {
  for (double w : {2.0, -3.0}) {
    const double margin = 0.31;
    const auto model = margin_model(w, margin);
    const nn::Sample s{Vector{0.5}, 0};
    for (int i = 0; i < 50; ++i) {
      auto cfg = AttackConfig::defaults(Family::FGSM);
      cfg.epsilon = 0.4 * (i + 0.5) / 50.0;
      const bool expected = cfg.epsilon * std::abs(w) > margin;
      EXPECT_EQ(fgsm(model, s, cfg).success, expected) << "eps=" << cfg.epsilon << " w=" << w;
    }
  }
}

TEST(FgsmTest, MinimalEpsilonBisection) {
  const auto model = margin_model(2.0, 0.3);
  const nn::Sample s{Vector{0.5}, 0};
  auto cfg = AttackConfig::defaults(Family::FGSM);
  cfg.epsilon = 0.4;
  cfg.minimal_epsilon = true;
  const auto r = fgsm(model, s, cfg);
  EXPECT_TRUE(r.success);
  // The flip happens at ε = margin / |w| = 0.15.
  EXPECT_GE(r.perturbation_norm, 0.15);
  EXPECT_LE(r.perturbation_norm, 0.15 + 1e-4);

  cfg.epsilon = 0.1;
  const auto miss = fgsm(model, s, cfg);
  EXPECT_FALSE(miss.success);
  EXPECT_NEAR(miss.perturbation_norm, 0.1, 1e-15);
}

TEST(FgmTest, StepHasExactL2NormBeforeClamp) {
  Rng rng(19);
  Matrix w(3, 6);
  for (double& x : w.values()) x = rng.normal(0.0, 0.1);
  const auto model = linear_model(w, Vector(3));
  const nn::Sample s{Vector(6, 0.5), 1};
  auto cfg = AttackConfig::defaults(Family::FGM);
  cfg.epsilon = 0.2;  // small enough that nothing leaves the box
  const auto r = fgm(model, s, cfg);
  EXPECT_NEAR(norm(r.x_adv - s.x0, Norm::L2), 0.2, 1e-12);
}

TEST(FgmTest, ZeroGradientLeavesInputAlone) {
  const auto model = linear_model(Matrix(2, 3), Vector(2));
  const nn::Sample s{Vector{0.2, 0.4, 0.6}, 0};
  EXPECT_EQ(fgm(model, s, AttackConfig::defaults(Family::FGM)).x_adv, s.x0);
}

TEST(PgdTest, VanishingEpsilonIsNoOp) {
  const auto& zoo = small_zoo();
  for (auto family : {Family::PGD, Family::LinfPGD, Family::L2PGD}) {
    auto cfg = AttackConfig::defaults(family);
    cfg.epsilon = 1e-12;
    for (int i = 0; i < 20; ++i) {
      const auto& s = zoo.data[i];
      if (zoo.model.predict_class(s.x0) != s.label) continue;
      const auto r = pgd(zoo.model, s, cfg);
      EXPECT_LE(norm(r.x_adv - s.x0, Norm::Linf), 2e-12);
      EXPECT_FALSE(r.success);
    }
  }
}

TEST(PgdTest, LinearModelConvergesToFgsmDirection) {
  Rng rng(23);
  Matrix w(2, 5);
  for (double& x : w.values()) x = rng.normal();
  const auto model = linear_model(w, Vector(2));
  const nn::Sample s{Vector(5, 0.5), 0};
  auto cfg = AttackConfig::defaults(Family::LinfPGD);
  const auto r = pgd(model, s, cfg);
  auto fgsm_cfg = AttackConfig::defaults(Family::FGSM);
  fgsm_cfg.epsilon = cfg.epsilon;
  const auto one_step = fgsm(model, s, fgsm_cfg);
  for (std::size_t j = 0; j < 5; ++j) {
    // Every component sits on the ball boundary, signed like w1 − w0.
    const double expected = cfg.epsilon * (w(1, j) - w(0, j) > 0 ? 1.0 : -1.0);
    EXPECT_NEAR(r.x_adv[j] - s.x0[j], expected, 1e-12);
    EXPECT_NEAR(r.x_adv[j], one_step.x_adv[j], 1e-12);
  }
}

TEST(PgdTest, RandomStartIsSeededAndContained) {
  const auto& zoo = small_zoo();
  auto cfg = AttackConfig::defaults(Family::L2PGD);
  cfg.epsilon = 0.2;
  cfg.random_start = true;
  cfg.random_start_seed = 77;
  const auto a = pgd(zoo.model, zoo.data[0], cfg);
  const auto b = pgd(zoo.model, zoo.data[0], cfg);
  EXPECT_EQ(a.x_adv, b.x_adv);
  EXPECT_LE(a.perturbation_norm, 0.2 + 1e-9);
}

TEST(PgdTest, SuccessRateMonotoneInEpsilon) {
  const auto& zoo = small_zoo();
  for (auto family : {Family::LinfPGD, Family::L2PGD}) {
    double previous = -1.0;
    for (double eps : {0.01, 0.03, 0.1, 0.3}) {
      auto cfg = AttackConfig::defaults(family);
      cfg.epsilon = eps;
      int successes = 0;
      for (int i = 0; i < 100; ++i) successes += pgd(zoo.model, zoo.data[i], cfg).success;
      const double rate = successes / 100.0;
      EXPECT_GE(rate, previous) << to_string(family) << " eps=" << eps;
      previous = rate;
    }
    EXPECT_GT(previous, 0.5);
  }
}

TEST(DeepFoolTest, MisclassifiedInputReturnedUnchanged) {
  const auto model = margin_model(2.0, -0.3);  // label 0 already loses
  const nn::Sample s{Vector{0.5}, 0};
  const auto r = deepfool_l2(model, s, AttackConfig::defaults(Family::L2DeepFool));
  EXPECT_EQ(r.x_adv, s.x0);
  EXPECT_EQ(r.iterations_used, 0u);
  EXPECT_TRUE(r.success);
}

TEST(DeepFoolTest, OneStepMatchesHyperplaneDistance) {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix w(2, 6);
    for (double& x : w.values()) x = rng.normal();
    Vector b{rng.normal(0.0, 0.1), 0.0};
    const Vector x0 = Vector(6, 0.5);
    const Vector f = matvec(w, x0) + b;
    const std::size_t label = f[0] >= f[1] ? 0 : 1;
    const auto model = linear_model(w, b);
    auto cfg = AttackConfig::defaults(Family::L2DeepFool);
    cfg.steps = 1;
    const auto r = deepfool_l2(model, {x0, label}, cfg);

    double wdiff = 0.0;
    for (std::size_t j = 0; j < 6; ++j) wdiff += std::pow(w(1, j) - w(0, j), 2);
    const double expected = (1 + cfg.overshoot) * std::abs(f[1] - f[0]) / std::sqrt(wdiff);
    if (expected > 0.45) continue;  // would leave the unit box
    EXPECT_NEAR(norm(r.x_adv - x0, Norm::L2), expected, 1e-6);
    EXPECT_EQ(r.iterations_used, 1u);
    EXPECT_TRUE(r.success);
  }
}

TEST(DeepFoolTest, DegenerateBoundariesAreSkipped) {
  // Identical rows: every class difference has zero gradient.
  const auto model = linear_model(Matrix(3, 2, {1, 1, 1, 1, 1, 1}), Vector{0.5, 0, 0});
  const nn::Sample s{Vector{0.3, 0.3}, 0};
  const auto r = deepfool_l2(model, s, AttackConfig::defaults(Family::L2DeepFool));
  EXPECT_EQ(r.x_adv, s.x0);
  EXPECT_FALSE(r.success);
}

TEST(RunAttackTest, DispatchMatchesDirectCall) {
  const auto& zoo = small_zoo();
  const auto& s = zoo.data[5];
  const auto cfg = AttackConfig::defaults(Family::FGSM);
  EXPECT_EQ(run_attack(cfg, zoo.model, s).x_adv, fgsm(zoo.model, s, cfg).x_adv);
  const auto df = AttackConfig::defaults(Family::L2DeepFool);
  EXPECT_EQ(run_attack(df, zoo.model, s).x_adv, deepfool_l2(zoo.model, s, df).x_adv);
}

TEST(RunAttackTest, InvariantSweepAcrossFamilies) {
  const auto& zoo = small_zoo();
  for (auto family : all_families()) {
    const auto cfg = AttackConfig::defaults(family);
    for (int i = 0; i < 60; ++i) {
      const auto& s = zoo.data[i];
      const auto r = run_attack(cfg, zoo.model, s);
      for (double v : r.x_adv) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      EXPECT_LE(norm(r.x_adv - s.x0, cfg.norm), cfg.epsilon + 1e-9) << to_string(family);
      EXPECT_DOUBLE_EQ(r.perturbation_norm, norm(r.x_adv - s.x0, cfg.norm));
      EXPECT_EQ(r.success, zoo.model.predict_class(r.x_adv) != s.label);

      const auto again = run_attack(cfg, zoo.model, s);
      ASSERT_EQ(std::memcmp(again.x_adv.values().data(), r.x_adv.values().data(),
                            r.x_adv.size() * sizeof(double)),
                0);
    }
  }
}

TEST(RunAttackTest, DimensionMismatchThrows) {
  const auto& zoo = small_zoo();
  const nn::Sample bad{Vector{0.1, 0.2}, 0};
  for (auto family : all_families()) {
    EXPECT_THROW(run_attack(AttackConfig::defaults(family), zoo.model, bad), DimensionError);
  }
}

}  // namespace
}  // namespace advf::attacks
