#include <gtest/gtest.h>

#include <cmath>

#include "mdp/error.hpp"
#include "mdp/objective.hpp"
#include "mdp/rng.hpp"

namespace mdp::objective {
namespace {

constexpr DeviationKind kKinds[] = {DeviationKind::kL1, DeviationKind::kL2, DeviationKind::kMse};

TEST(DeviationMeasure, ZeroForEqualRows) {
  const double u[] = {1.5, -2.0, 3.0};
  for (auto k : kKinds) EXPECT_EQ(deviation_measure(u, u, k), 0.0);
}

TEST(DeviationMeasure, HandExamples) {
  const double u[] = {1, 1}, w[] = {1, 3};
  EXPECT_DOUBLE_EQ(deviation_measure(u, w, DeviationKind::kMse), 2.0);
  EXPECT_DOUBLE_EQ(deviation_measure(u, w, DeviationKind::kL1), 2.0);
  EXPECT_DOUBLE_EQ(deviation_measure(u, w, DeviationKind::kL2), 2.0);
}

TEST(DeviationMeasure, NonNegativeAndSymmetric) {
  Xoshiro256 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(1 + rng.below(10)), w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = rng.normal();
      w[i] = rng.normal();
    }
    for (auto k : kKinds) {
      const double a = deviation_measure(u, w, k);
      EXPECT_GE(a, 0.0);
      EXPECT_DOUBLE_EQ(a, deviation_measure(w, u, k));
    }
  }
}

TEST(TemporalDeviation, ConstantRowsGiveHalf) {
  interact::ComprehensiveFeatures x{Tensor2D(5, 4, 1.25), 1, 5.0};
  for (auto k : kKinds) EXPECT_DOUBLE_EQ(temporal_deviation(x, k), 0.5);
}

TEST(TemporalDeviation, SingleJunction) {
  interact::ComprehensiveFeatures x{Tensor2D::from_rows({{1, 1}, {1, 3}}), 1, 2.0};
  EXPECT_NEAR(temporal_deviation(x, DeviationKind::kMse), 0.8807970779778823, 1e-12);
}

TEST(TemporalDeviation, MeanVersusSumReduce) {
  interact::ComprehensiveFeatures x{Tensor2D::from_rows({{0}, {1}, {3}}), 1, 3.0};
  const double mean = temporal_deviation(x, DeviationKind::kL1, DeviationReduce::kMean);
  const double sum = temporal_deviation(x, DeviationKind::kL1, DeviationReduce::kSum);
  EXPECT_NEAR(mean, 1 / (1 + std::exp(-1.5)), 1e-12);
  EXPECT_NEAR(sum, 1 / (1 + std::exp(-3.0)), 1e-12);
}

TEST(TemporalDeviation, NeedsTwoSteps) {
  interact::ComprehensiveFeatures x{Tensor2D(1, 4, 1.0), 1, 1.0};
  EXPECT_THROW(temporal_deviation(x, DeviationKind::kMse), ContractError);
}

TEST(TemporalDeviation, GraphMatchesValueForm) {
  Xoshiro256 rng(4);
  Tensor2D v(7, 6);
  for (double& e : v.data()) e = rng.normal();
  for (auto k : kKinds) {
    for (auto red : {DeviationReduce::kMean, DeviationReduce::kSum}) {
      Graph g;
      const NodeRef d = temporal_deviation(g, g.constant(v), k, red);
      EXPECT_NEAR(g.value(d)(0, 0), temporal_deviation({v, 1, 7.0}, k, red), 1e-12);
    }
  }
}

TEST(DpLoss, Examples) {
  const double half[] = {0.5};
  const int one[] = {1}, zero[] = {0};
  EXPECT_NEAR(dp_loss(half, one), 0.6931471805599453, 1e-12);
  EXPECT_NEAR(dp_loss(half, zero), 0.6931471805599453, 1e-12);
  const double sure[] = {1.0};
  EXPECT_NEAR(dp_loss(sure, one), -std::log(1 - kLossEps), 1e-12);
  EXPECT_TRUE(std::isfinite(dp_loss(sure, zero)));
}

TEST(ClsLoss, Examples) {
  EXPECT_NEAR(cls_loss({0.5, 0.5}, 0), 0.6931471805599453, 1e-12);
  EXPECT_NEAR(cls_loss({0.5, 0.5}, 1), 0.6931471805599453, 1e-12);
  EXPECT_NEAR(cls_loss({0.0, 1.0}, 1), -std::log(1 - kLossEps), 1e-12);
  EXPECT_NEAR(cls_loss({0.25, 0.75}, 0), 1.3862943611198906, 1e-12);
  const std::array<double, 2> batch[] = {{0.5, 0.5}, {0.25, 0.75}};
  const int labels[] = {1, 0};
  EXPECT_NEAR(cls_loss(batch, labels), (0.6931471805599453 + 1.3862943611198906) / 2, 1e-12);
}

TEST(TotalLoss, Combination) {
  EXPECT_DOUBLE_EQ(total_loss(1.0, 2.0, 0.5).total, 2.0);
  EXPECT_DOUBLE_EQ(total_loss(1.0, 2.0, 0.0).total, 1.0);
  const auto b = total_loss(0.25, 0.5, 0.5);
  EXPECT_EQ(b.l_cls, 0.25);
  EXPECT_EQ(b.l_dp, 0.5);
  EXPECT_EQ(b.phi, 0.5);
}

TEST(Names, RoundTrip) {
  for (auto k : kKinds) EXPECT_EQ(deviation_kind_from_string(to_string(k)), k);
  for (auto r : {DeviationReduce::kMean, DeviationReduce::kSum}) {
    EXPECT_EQ(deviation_reduce_from_string(to_string(r)), r);
  }
  EXPECT_THROW(deviation_kind_from_string("L3"), ConfigError);
}

}  // namespace
}  // namespace mdp::objective
