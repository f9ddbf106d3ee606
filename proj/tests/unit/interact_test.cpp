#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdp/error.hpp"
#include "mdp/interact.hpp"
#include "mdp/rng.hpp"

namespace mdp::interact {
namespace {

Tensor2D random(std::size_t r, std::size_t c, Xoshiro256& rng) {
  Tensor2D t(r, c);
  for (double& v : t.data()) v = rng.normal();
  return t;
}

AttentionWeights ones(std::size_t d) {
  return {Tensor2D(d, d, 1.0), Tensor2D(d, d, 1.0), Tensor2D(d, d, 1.0)};
}

TEST(ProbEncode, IdentityWeightsHandExample) {
  EncoderWeights enc{Tensor2D::from_rows({{1, 0}, {0, 1}}), Tensor2D(1, 2, 1.0),
                     Tensor2D(1, 2, 0.0)};
  const Tensor2D out = prob_encode(Tensor2D::from_rows({{1, -1}}), enc, 1e-12);
  EXPECT_NEAR(out(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(out(0, 1), -1.0, 1e-9);
}

TEST(ProbEncode, NegativeTokenMapsToBias) {
  EncoderWeights enc{Tensor2D::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}),
                     Tensor2D(1, 3, 2.0), Tensor2D::from_rows({{0.1, 0.2, 0.3}})};
  const Tensor2D out = prob_encode(Tensor2D::from_rows({{-1, -2, -3}}), enc);
  EXPECT_EQ(out, enc.ln_bias);
}

TEST(ProbEncode, RowsAreNormalized) {
  Xoshiro256 rng(3);
  EncoderWeights enc{random(5, 8, rng), Tensor2D(1, 8, 1.0), Tensor2D(1, 8, 0.0)};
  const Tensor2D out = prob_encode(random(6, 5, rng), enc, 0.0 + 1e-12);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto row = out.row(r);
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / 8;
    double var = 0;
    for (double v : row) var += (v - mean) * (v - mean);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    if (var > 0) EXPECT_NEAR(var / 8, 1.0, 1e-6);
  }
}

TEST(ProbEncode, ShapeMismatchIsDimensionError) {
  EncoderWeights enc{Tensor2D(3, 2, 1.0), Tensor2D(1, 2, 1.0), Tensor2D(1, 2, 0.0)};
  EXPECT_THROW(prob_encode(Tensor2D(4, 5, 1.0), enc), DimensionError);
}

TEST(CrossAttend, HandWalkThrough) {
  const auto att = cross_attend(Tensor2D::from_rows({{1}, {1}}),
                                Tensor2D::from_rows({{2}, {0}}), ones(1));
  const double e4 = std::exp(4.0);
  ASSERT_EQ(att.relevance.size(), 2u);
  EXPECT_NEAR(att.relevance[0], e4 / (e4 + 1), 1e-12);
  EXPECT_NEAR(att.relevance[1], 1 / (e4 + 1), 1e-12);
  EXPECT_NEAR(att.enhanced(0, 0), 2 * e4 / (e4 + 1), 1e-12);
  EXPECT_NEAR(att.enhanced(0, 0), 1.964, 1e-3);
  EXPECT_EQ(att.enhanced(1, 0), 0.0);
}

TEST(CrossAttend, IdenticalKeyRowsGiveUniformRelevance) {
  Xoshiro256 rng(11);
  const std::size_t t = 5, d = 3;
  Tensor2D kv(t, d);
  const Tensor2D row = random(1, d, rng);
  for (std::size_t r = 0; r < t; ++r) std::copy(row.row(0).begin(), row.row(0).end(), kv.row(r).begin());
  AttentionWeights w{random(d, d, rng), random(d, d, rng), random(d, d, rng)};
  const auto att = cross_attend(random(t, d, rng), kv, w);
  Tensor2D v(t, d);
  for (std::size_t r = 0; r < t; ++r) {
    EXPECT_NEAR(att.relevance[r], 1.0 / t, 1e-12);
    for (std::size_t c = 0; c < d; ++c) {
      double vc = 0;
      for (std::size_t k = 0; k < d; ++k) vc += kv(r, k) * w.wv(k, c);
      EXPECT_NEAR(att.enhanced(r, c), vc / t, 1e-12);
    }
  }
}

TEST(CrossAttend, InvariantToQueryRowPermutation) {
  Xoshiro256 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t t = 2 + rng.below(8), d = 1 + rng.below(4);
    const Tensor2D q = random(t, d, rng), kv = random(t, d, rng);
    AttentionWeights w{random(d, d, rng), random(d, d, rng), random(d, d, rng)};
    std::vector<std::size_t> perm(t);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = t - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Tensor2D qp(t, d);
    for (std::size_t r = 0; r < t; ++r) {
      std::copy(q.row(perm[r]).begin(), q.row(perm[r]).end(), qp.row(r).begin());
    }
    const auto a = cross_attend(q, kv, w), b = cross_attend(qp, kv, w);
    for (std::size_t k = 0; k < a.enhanced.size(); ++k) {
      EXPECT_NEAR(a.enhanced.data()[k], b.enhanced.data()[k], 1e-10);
    }
  }
}

TEST(CrossAttend, RelevanceIsADistribution) {
  Xoshiro256 rng(13);
  const std::size_t t = 9, d = 4;
  AttentionWeights w{random(d, d, rng), random(d, d, rng), random(d, d, rng)};
  const auto att = cross_attend(random(t, d, rng), random(t, d, rng), w);
  EXPECT_NEAR(std::accumulate(att.relevance.begin(), att.relevance.end(), 0.0), 1.0, 1e-12);
  for (double r : att.relevance) EXPECT_GE(r, 0.0);
}

TEST(CrossAttend, MismatchedLengthsRejected) {
  EXPECT_THROW(cross_attend(Tensor2D(3, 2, 1.0), Tensor2D(4, 2, 1.0), ones(2)), DimensionError);
}

TEST(Fuse, Layout) {
  const auto x = fuse(Tensor2D(1, 1, 1.0), Tensor2D(1, 1, 2.0), Tensor2D(1, 1, 3.0),
                      Tensor2D(1, 1, 4.0), 2.0);
  EXPECT_EQ(x.x, Tensor2D::from_rows({{1, 2, 3, 4}}));
  EXPECT_EQ(x.d, 1u);
  EXPECT_EQ(x.duration_s, 2.0);
  EXPECT_EQ(x.steps(), 1u);
}

TEST(Fuse, ZeroAttentionIsBaselineConcatenation) {
  const Tensor2D v = Tensor2D::from_rows({{1, 2}, {3, 4}});
  const Tensor2D a = Tensor2D::from_rows({{5, 6}, {7, 8}});
  const auto x = fuse(v, Tensor2D(2, 2), a, Tensor2D(2, 2), 1.0);
  EXPECT_EQ(x.x, Tensor2D::from_rows({{1, 2, 0, 0, 5, 6, 0, 0}, {3, 4, 0, 0, 7, 8, 0, 0}}));
}

TEST(Fuse, RaggedBlocksRejected) {
  EXPECT_THROW(fuse(Tensor2D(2, 1), Tensor2D(3, 1), Tensor2D(2, 1), Tensor2D(2, 1), 1.0),
               DimensionError);
}

}  // namespace
}  // namespace mdp::interact
