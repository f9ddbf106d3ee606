#include <gtest/gtest.h>

#include "mdp/align.hpp"
#include "mdp/error.hpp"
#include "mdp/rng.hpp"

namespace mdp::align {
namespace {

TokenSequence sequence(std::initializer_list<std::initializer_list<double>> rows) {
  return {corpus::Modality::kVisual, Tensor2D::from_rows(rows)};
}

TEST(Tokenize, FlattensFrameRowMajor) {
  corpus::FeatureMatrix f;
  f.n_frames = 1;
  f.raw_dim = 4;  // a 2x2 grid
  f.data = {1.f, 2.f, 3.f, 4.f};
  const auto seq = tokenize(f);
  ASSERT_EQ(seq.n_steps(), 1u);
  ASSERT_EQ(seq.dim(), 4u);
  EXPECT_EQ(seq.tokens(0, 0), 1.0);
  EXPECT_EQ(seq.tokens(0, 3), 4.0);
}

TEST(Tokenize, EmptyStreamGivesEmptySequence) {
  corpus::FeatureMatrix f;
  f.modality = corpus::Modality::kAudio;
  f.raw_dim = 3;
  const auto seq = tokenize(f);
  EXPECT_EQ(seq.n_steps(), 0u);
  EXPECT_EQ(seq.modality, corpus::Modality::kAudio);
  EXPECT_THROW(temporal_pool(seq, 1), AlignmentError);
}

TEST(TemporalPool, BinMeans) {
  const auto out = temporal_pool(sequence({{1}, {3}, {5}, {7}}), 2);
  EXPECT_EQ(out.tokens, Tensor2D::from_rows({{2}, {6}}));
}

TEST(TemporalPool, UnevenBinsFollowFloorBoundaries) {
  const auto out = temporal_pool(sequence({{1}, {2}, {3}, {4}, {5}}), 2);
  EXPECT_DOUBLE_EQ(out.tokens(0, 0), 1.5);  // {0,1}
  EXPECT_DOUBLE_EQ(out.tokens(1, 0), 4.0);  // {2,3,4}
}

TEST(TemporalPool, ConstantStaysConstant) {
  Xoshiro256 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t t = 1 + rng.below(n);
    TokenSequence seq{corpus::Modality::kAudio, Tensor2D(n, 3, 2.5)};
    const auto out = temporal_pool(seq, t);
    EXPECT_EQ(out.tokens, Tensor2D(t, 3, 2.5));
    EXPECT_EQ(out.modality, corpus::Modality::kAudio);
  }
}

TEST(TemporalPool, IdentityWhenLengthsMatch) {
  const auto seq = sequence({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(temporal_pool(seq, 3).tokens, seq.tokens);
}

TEST(TemporalPool, PreservesColumnMeansForEvenBins) {
  Xoshiro256 rng(8);
  Tensor2D x(12, 2);
  for (double& v : x.data()) v = rng.normal();
  const auto out = temporal_pool({corpus::Modality::kVisual, x}, 4);
  for (std::size_t c = 0; c < 2; ++c) {
    double a = 0, b = 0;
    for (std::size_t r = 0; r < 12; ++r) a += x(r, c);
    for (std::size_t r = 0; r < 4; ++r) b += out.tokens(r, c);
    EXPECT_NEAR(a / 12, b / 4, 1e-12);
  }
}

TEST(TemporalPool, RefusesUpsamplingAndZero) {
  const auto seq = sequence({{1}, {2}});
  EXPECT_THROW(temporal_pool(seq, 3), AlignmentError);
  EXPECT_THROW(temporal_pool(seq, 0), ContractError);
}

}  // namespace
}  // namespace mdp::align
