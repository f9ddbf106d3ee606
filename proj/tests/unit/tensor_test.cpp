#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mdp/error.hpp"
#include "mdp/rng.hpp"
#include "mdp/tensor.hpp"

namespace mdp {
namespace {

TEST(Tensor2D, ConstructsRowMajor) {
  Tensor2D t = Tensor2D::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t(1, 0), 4.0);
  EXPECT_EQ(t.data()[2], 3.0);
  EXPECT_EQ(t.row(1)[2], 6.0);
  EXPECT_EQ(t.shape_string(), "(2x3)");
}

TEST(Tensor2D, RejectsDataOfWrongLength) {
  EXPECT_THROW(Tensor2D(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(Tensor2D, FiniteCheck) {
  Tensor2D t(2, 2, 1.0);
  EXPECT_TRUE(t.all_finite());
  t(0, 1) = std::nan("");
  EXPECT_FALSE(t.all_finite());
}

TEST(Tensor2D, VectorsHaveExpectedOrientation) {
  const double v[] = {1, 2, 3};
  EXPECT_EQ(Tensor2D::row_vector(v).rows(), 1u);
  EXPECT_EQ(Tensor2D::column_vector(v).cols(), 1u);
  EXPECT_EQ(Tensor2D::column_vector(v)(2, 0), 3.0);
}

TEST(Rng, SameSeedSameStream) {
  Xoshiro256 a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, StateRestoreResumesStream) {
  Xoshiro256 a(7);
  a.next();
  const auto saved = a.state();
  const auto x = a.next();
  Xoshiro256 b;
  b.set_state(saved);
  EXPECT_EQ(b.next(), x);
}

TEST(Rng, UniformAndBelowStayInRange) {
  Xoshiro256 r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = r.below(5);
    ASSERT_LT(k, 5u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Rng, NormalHasRoughlyUnitMoments) {
  Xoshiro256 r(3);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 1000; ++s) seeds.insert(derive_seed(5, s));
  EXPECT_EQ(seeds.size(), 1000u);
}

}  // namespace
}  // namespace mdp
