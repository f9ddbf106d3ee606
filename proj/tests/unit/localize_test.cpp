#include <gtest/gtest.h>

#include <cmath>

#include "mdp/error.hpp"
#include "mdp/localize.hpp"
#include "temp_dir.hpp"

namespace mdp::localize {
namespace {

// FAS over `forged.size()` steps spanning `duration` seconds.
ForgeryActivationSequence fas_of(const std::vector<double>& forged, double duration) {
  ForgeryActivationSequence fas;
  fas.probs = Tensor2D(forged.size(), 2);
  for (std::size_t t = 0; t < forged.size(); ++t) {
    fas.probs(t, 0) = 1.0 - forged[t];
    fas.probs(t, 1) = forged[t];
  }
  fas.duration_s = duration;
  return fas;
}

TEST(FasHead, ZeroWeightsGiveEvenOdds) {
  interact::ComprehensiveFeatures x{Tensor2D(3, 8, 0.7), 2, 3.0};
  const auto fas = fas_head(x, {Tensor2D(8, 2), Tensor2D(1, 2)});
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_DOUBLE_EQ(fas.probs(t, 0), 0.5);
    EXPECT_DOUBLE_EQ(fas.probs(t, 1), 0.5);
  }
  EXPECT_EQ(fas.duration_s, 3.0);
}

TEST(FasHead, BiasLogitsLn3) {
  interact::ComprehensiveFeatures x{Tensor2D(2, 4), 1, 1.0};
  const auto fas = fas_head(x, {Tensor2D(4, 2), Tensor2D::from_rows({{0, std::log(3.0)}})});
  EXPECT_NEAR(fas.probs(1, 0), 0.25, 1e-12);
  EXPECT_NEAR(fas.probs(1, 1), 0.75, 1e-12);
}

TEST(FasHead, WrongFeatureWidthRejected) {
  interact::ComprehensiveFeatures x{Tensor2D(2, 5), 1, 1.0};
  EXPECT_THROW(fas_head(x, {Tensor2D(4, 2), Tensor2D(1, 2)}), DimensionError);
}

TEST(VideoScore, MeanOfRows) {
  auto s = video_score(fas_of({0.7, 0.7, 0.7}, 3.0));
  EXPECT_NEAR(s[0], 0.3, 1e-12);
  EXPECT_NEAR(s[1], 0.7, 1e-12);
  s = video_score(fas_of({0.0, 1.0}, 2.0));
  EXPECT_DOUBLE_EQ(s[0], 0.5);
  EXPECT_DOUBLE_EQ(s[1], 0.5);
}

TEST(DecodeSegments, SingleRun) {
  std::vector<double> p(10, 0.1);
  p[3] = p[4] = p[5] = 0.9;
  EXPECT_EQ(decode_segments(fas_of(p, 10.0)), (std::vector<SegmentSpan>{{3.0, 6.0}}));
}

TEST(DecodeSegments, NothingAboveThreshold) {
  EXPECT_TRUE(decode_segments(fas_of(std::vector<double>(10, 0.5), 10.0)).empty());
}

TEST(DecodeSegments, TwoRunsIncludingEdges) {
  std::vector<double> p(9, 0.0);
  p[0] = p[1] = p[8] = 0.8;
  const double dt = 4.5 / 9;
  const auto segs = decode_segments(fas_of(p, 4.5));
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_DOUBLE_EQ(segs[0].start_s, 0.0);
  EXPECT_DOUBLE_EQ(segs[0].end_s, 2 * dt);
  EXPECT_DOUBLE_EQ(segs[1].start_s, 8 * dt);
  EXPECT_DOUBLE_EQ(segs[1].end_s, 4.5);
}

TEST(DecodeSegments, SpansAreSortedDisjointAndInRange) {
  std::vector<double> p;
  for (int t = 0; t < 64; ++t) p.push_back(0.5 + 0.5 * std::sin(t * 0.7));
  const auto segs = decode_segments(fas_of(p, 16.0), 0.6);
  ASSERT_FALSE(segs.empty());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_LT(segs[i].start_s, segs[i].end_s);
    EXPECT_GE(segs[i].start_s, 0.0);
    EXPECT_LE(segs[i].end_s, 16.0);
    if (i > 0) EXPECT_LT(segs[i - 1].end_s, segs[i].start_s);
  }
}

TEST(RankProposals, PlateauGivesOneProposal) {
  std::vector<double> p(8, 0.05);
  p[2] = p[3] = p[4] = 0.9;
  const auto grid = default_theta_grid();
  const auto props = rank_proposals(fas_of(p, 8.0), grid);
  ASSERT_EQ(props.size(), 1u);
  EXPECT_NEAR(props[0].score, 0.9, 1e-12);
  EXPECT_EQ(props[0].span, (SegmentSpan{2.0, 5.0}));
}

TEST(RankProposals, AllGenuineIsEmpty) {
  const auto grid = default_theta_grid();
  EXPECT_TRUE(rank_proposals(fas_of(std::vector<double>(8, 0.01), 8.0), grid).empty());
}

TEST(RankProposals, NestedExtentsInnerScoresHigher) {
  const std::vector<double> p{0.0, 0.4, 0.4, 0.9, 0.9, 0.4, 0.4, 0.0};
  const double grid[] = {0.3, 0.7};
  const auto props = rank_proposals(fas_of(p, 8.0), grid);
  ASSERT_EQ(props.size(), 2u);
  EXPECT_EQ(props[0].span, (SegmentSpan{3.0, 5.0}));
  EXPECT_EQ(props[1].span, (SegmentSpan{1.0, 7.0}));
  EXPECT_GT(props[0].score, props[1].score);
}

TEST(RankProposals, DefaultGrid) {
  const auto grid = default_theta_grid();
  ASSERT_EQ(grid.size(), 9u);
  EXPECT_NEAR(grid.front(), 0.1, 1e-12);
  EXPECT_NEAR(grid.back(), 0.9, 1e-12);
}

TEST(Files, PredictionsAndActivationsRoundTrip) {
  mdp::testing::TempDir dir;
  const std::vector<VideoPredictions> preds{{"a", {{{0.5, 1.25}, 0.75}, {{2.0, 3.0}, 0.1}}},
                                            {"b", {}}};
  write_predictions(dir / "p.json", preds);
  const auto back = read_predictions(dir / "p.json");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].video_id, "a");
  EXPECT_EQ(back[0].proposals, preds[0].proposals);
  EXPECT_TRUE(back[1].proposals.empty());

  const std::vector<VideoActivation> acts{{"a", fas_of({0.125, 0.875, 1.0 / 3}, 1.5)}};
  write_activations(dir / "f.json", acts);
  const auto fas = read_activations(dir / "f.json");
  ASSERT_EQ(fas.size(), 1u);
  EXPECT_EQ(fas[0].fas.probs, acts[0].fas.probs);
  EXPECT_EQ(fas[0].fas.duration_s, 1.5);
}

}  // namespace
}  // namespace mdp::localize
