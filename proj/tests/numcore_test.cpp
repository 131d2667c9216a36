#include "advf/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gtest/gtest.h"
#include "test_models.hpp"

namespace advf {
namespace {

TEST(MatvecTest, IdentityReturnsInput) {
  EXPECT_EQ(matvec(Matrix::identity(3), Vector{1, 2, 3}), (Vector{1, 2, 3}));
}

TEST(MatvecTest, ZeroMatrixGivesZeroVector) {
  EXPECT_EQ(matvec(Matrix(2, 3), Vector{4, -5, 6}), Vector(2));
}

TEST(MatvecTest, HandComputedProduct) {
  Matrix m(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(matvec(m, Vector{1, 1}), (Vector{3, 7}));
}

TEST(MatvecTest, DimensionMismatchThrows) {
  EXPECT_THROW(matvec(Matrix(2, 3), Vector{1, 2}), DimensionError);
  EXPECT_THROW(Matrix(2, 2, {1, 2, 3}), DimensionError);
}

TEST(MatvecTest, TransposedMatchesExplicitTranspose) {
  Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  Matrix t(3, 2, {1, 4, 2, 5, 3, 6});
  Vector v{0.5, -2};
  EXPECT_EQ(matvec_transposed(m, v), matvec(t, v));
}

TEST(MatvecTest, Linearity) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m(4, 5);
    for (double& x : m.values()) x = rng.normal();
    const Vector u = testing::random_vector(5, rng);
    const Vector w = testing::random_vector(5, rng);
    const double a = rng.normal();
    const double b = rng.normal();
    const Vector lhs = matvec(m, a * u + b * w);
    const Vector rhs = a * matvec(m, u) + b * matvec(m, w);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      EXPECT_NEAR(lhs[i], rhs[i], 1e-9 * std::max(1.0, std::abs(rhs[i])));
    }
  }
}

TEST(NormTest, KnownValues) {
  EXPECT_DOUBLE_EQ(norm(Vector{3, 4}, Norm::L2), 5.0);
  EXPECT_DOUBLE_EQ(norm(Vector{0.2, -0.5}, Norm::Linf), 0.5);
  EXPECT_EQ(norm(Vector(4), Norm::L2), 0.0);
  EXPECT_EQ(norm(Vector(4), Norm::Linf), 0.0);
}

TEST(NormTest, LinfNeverExceedsL2) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Vector v = testing::random_vector(1 + rng.index(8), rng);
    // Sprinkle exact zeros so the single-nonzero equality case shows up.
    for (double& x : v) {
      if (rng.uniform() < 0.4) x = 0.0;
    }
    const double linf = norm(v, Norm::Linf);
    const double l2 = norm(v, Norm::L2);
    EXPECT_LE(linf, l2 * (1 + 1e-15));
    const auto nonzero = std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
    if (nonzero <= 1) {
      EXPECT_DOUBLE_EQ(linf, l2);
    } else {
      EXPECT_LT(linf, l2);
    }
  }
}

TEST(SignTest, ComponentwiseWithZero) {
  EXPECT_EQ(sign(Vector{2.5, -0.1, 0}), (Vector{1, -1, 0}));
  EXPECT_EQ(sign(Vector(3)), Vector(3));
}

TEST(SignTest, Idempotent) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = testing::random_vector(6, rng);
    EXPECT_EQ(sign(sign(v)), sign(v));
  }
}

TEST(ArgmaxTest, TiesGoToLowestIndex) {
  const double uniform[] = {0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(argmax(uniform), 0u);
  const double probs[] = {0.1, 0.7, 0.2};
  EXPECT_EQ(argmax(probs), 1u);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
  }
  Rng c(42);
  Rng d(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = c.normal();
    const double y = d.normal();
    EXPECT_EQ(std::memcmp(&x, &y, sizeof x), 0);
  }
}

TEST(RngTest, KnownFirstOutputs) {
  // Frozen so a change to the generator constants is caught.
  Rng rng(0);
  EXPECT_EQ(rng.next_u64(), 0x99EC5F36CB75F2B4ULL);
  EXPECT_EQ(rng.next_u64(), 0xBF6E1F784956452AULL);
}

TEST(RngTest, UniformRangeAndIndexBounds) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.index(7), 7u);
  }
  EXPECT_THROW(rng.index(0), std::invalid_argument);
}

TEST(RngTest, NormalMoments) {
  Rng rng(9);
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
}

TEST(RngTest, DerivedStreamsAreIndependentOfParentState) {
  Rng parent(100);
  const Rng child_before = parent.derive(3);
  parent.next_u64();
  Rng child_after = parent.derive(3);
  Rng copy = child_before;
  EXPECT_EQ(copy.next_u64(), child_after.next_u64());
  EXPECT_NE(parent.derive(3).seed(), parent.derive(4).seed());
  EXPECT_NE(Rng::derive_seed(100, 0), 100u);
}

}  // namespace
}  // namespace advf
