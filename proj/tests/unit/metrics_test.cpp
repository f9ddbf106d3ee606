#include <gtest/gtest.h>

#include <cmath>

#include "mdp/error.hpp"
#include "mdp/metrics.hpp"
#include "random_eval.hpp"
#include "temp_dir.hpp"

namespace mdp::metrics {
namespace {

EvalInput one_video(std::vector<SegmentSpan> gts, std::vector<localize::SegmentProposal> preds) {
  EvalInput in;
  in.gts["a"] = std::move(gts);
  in.preds["a"] = std::move(preds);
  return in;
}

void expect_same(const EvalReport& a, const EvalReport& b, double tol) {
  ASSERT_EQ(a.ap.size(), b.ap.size());
  ASSERT_EQ(a.ar.size(), b.ar.size());
  for (std::size_t i = 0; i < a.ap.size(); ++i) EXPECT_NEAR(a.ap[i], b.ap[i], tol);
  for (std::size_t i = 0; i < a.ar.size(); ++i) EXPECT_NEAR(a.ar[i], b.ar[i], tol);
  EXPECT_NEAR(a.ap_avg, b.ap_avg, tol);
  EXPECT_NEAR(a.ar_avg, b.ar_avg, tol);
  EXPECT_EQ(a.n_gt, b.n_gt);
  EXPECT_EQ(a.n_predictions, b.n_predictions);
}

TEST(SegmentIou, Examples) {
  EXPECT_DOUBLE_EQ(segment_iou({0, 1}, {0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(segment_iou({0, 1}, {2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(segment_iou({0, 2}, {1, 3}), 1.0 / 3);
  EXPECT_DOUBLE_EQ(segment_iou({0, 1}, {1, 2}), 0.0);
}

TEST(SegmentIou, SymmetricAndBounded) {
  Xoshiro256 rng(1);
  for (int i = 0; i < 1000; ++i) {
    double a = rng.uniform(), b = a + rng.uniform(), c = rng.uniform(), d = c + rng.uniform();
    const double x = segment_iou({a, b}, {c, d});
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    EXPECT_DOUBLE_EQ(x, segment_iou({c, d}, {a, b}));
  }
}

TEST(AveragePrecision, PerfectPrediction) {
  EXPECT_DOUBLE_EQ(average_precision(one_video({{1, 3}}, {{{1, 3}, 0.9}}), 0.5), 1.0);
}

TEST(AveragePrecision, FalsePositiveAfterRecallReached) {
  // IoU({0,1},{0.4,1}) = 0.6
  const auto in = one_video({{0, 1}}, {{{0.4, 1.0}, 0.9}, {{5, 6}, 0.8}});
  EXPECT_DOUBLE_EQ(average_precision(in, 0.5), 1.0);
}

TEST(AveragePrecision, NoMatchPossible) {
  // IoU = 0.3
  const auto in = one_video({{0, 1}}, {{{0.7, 1.0}, 0.9}});
  EXPECT_DOUBLE_EQ(average_precision(in, 0.5), 0.0);
}

TEST(AveragePrecision, EmptyConventions) {
  EXPECT_DOUBLE_EQ(average_precision(one_video({}, {}), 0.5), 1.0);
  EXPECT_DOUBLE_EQ(average_precision(one_video({}, {{{0, 1}, 0.5}}), 0.5), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(one_video({{0, 1}}, {}), 0.5), 0.0);
}

TEST(AveragePrecision, HandComputedCurve) {
  // Ranks: TP, FP, TP over 2 GT -> precision 1, 1/2, 2/3; AP = 0.5*1 + 0.5*2/3.
  EvalInput in;
  in.gts["a"] = {{0, 1}};
  in.gts["b"] = {{0, 1}};
  in.preds["a"] = {{{0, 1}, 0.9}, {{3, 4}, 0.8}};
  in.preds["b"] = {{{0, 1}, 0.7}};
  EXPECT_NEAR(average_precision(in, 0.5), 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
}

TEST(AveragePrecision, DuplicateDetectionCountsOnce) {
  const auto in = one_video({{0, 1}}, {{{0, 1}, 0.9}, {{0, 1}, 0.8}});
  EXPECT_DOUBLE_EQ(average_precision(in, 0.5), 1.0);
  const auto late = one_video({{0, 1}, {2, 3}}, {{{0, 1}, 0.9}, {{0, 1}, 0.8}, {{2, 3}, 0.7}});
  EXPECT_NEAR(average_precision(late, 0.5), 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
}

TEST(AverageRecall, GridCount) {
  // IoU({0,1},{0,0.9/1}) = 0.9 -> matched for 9 of 10 thresholds.
  const auto in = one_video({{0, 1}}, {{{5, 6}, 0.95}, {{0, 0.9}, 0.9}, {{0, 1}, 0.1}});
  EXPECT_NEAR(average_recall_at_k(in, 2, default_ar_iou_grid()), 0.9, 1e-12);
  EXPECT_NEAR(average_recall_at_k(in, 3, default_ar_iou_grid()), 1.0, 1e-12);
  EXPECT_NEAR(average_recall_at_k(in, 1, default_ar_iou_grid()), 0.0, 1e-12);
}

TEST(AverageRecall, EmptyAndExact) {
  EXPECT_DOUBLE_EQ(average_recall_at_k(one_video({{0, 1}}, {}), 5, default_ar_iou_grid()), 0.0);
  const auto in = one_video({{0, 1}}, {{{0, 1}, 0.9}});
  for (std::size_t k : {1, 2, 5, 20}) {
    EXPECT_DOUBLE_EQ(average_recall_at_k(in, k, default_ar_iou_grid()), 1.0);
  }
  EXPECT_DOUBLE_EQ(average_recall_at_k(one_video({}, {{{0, 1}, 0.9}}), 5, default_ar_iou_grid()),
                   0.0);
}

TEST(AverageRecall, MonotoneInK) {
  Xoshiro256 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto in = mdp::testing::random_eval_input(rng);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 12; ++k) {
      const double ar = average_recall_at_k(in, k, default_ar_iou_grid());
      EXPECT_GE(ar, prev - 1e-15);
      EXPECT_LE(ar, 1.0);
      prev = ar;
    }
  }
}

TEST(AveragePrecision, BoundedAndMonotoneInTau) {
  Xoshiro256 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto in = mdp::testing::random_eval_input(rng);
    double prev = 1.0;
    for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double ap = average_precision(in, tau);
      EXPECT_GE(ap, 0.0);
      EXPECT_LE(ap, prev + 1e-12);
      prev = ap;
    }
  }
}

TEST(Presets, Grids) {
  EXPECT_EQ(eval_preset("lavdf").ap_iou_grid, (std::vector<double>{0.5, 0.75, 0.95}));
  EXPECT_EQ(eval_preset("av1m").ap_iou_grid.size(), 7u);
  const auto grid = default_ar_iou_grid();
  ASSERT_EQ(grid.size(), 10u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.5);
  EXPECT_DOUBLE_EQ(grid.back(), 0.95);
  EXPECT_THROW(eval_preset("thumos"), ConfigError);
}

TEST(Evaluate, PerfectPredictionsScoreOne) {
  std::vector<corpus::VideoAnnotation> ann{
      {"g", 10, 0, {}, corpus::ModalityType::kReal},
      {"f", 10, 1, {{1, 2}, {4, 6}}, corpus::ModalityType::kAudioVisual}};
  std::vector<localize::VideoPredictions> preds{{"g", {}}, {"f", {{{1, 2}, 1.0}, {{4, 6}, 1.0}}}};
  const auto r = evaluate(preds, ann, eval_preset("lavdf"));
  for (double ap : r.ap) EXPECT_DOUBLE_EQ(ap, 1.0);
  for (double ar : r.ar) EXPECT_DOUBLE_EQ(ar, 1.0);
  EXPECT_EQ(r.n_videos, 2u);
  EXPECT_EQ(r.n_gt, 2u);
  EXPECT_EQ(r.n_predictions, 2u);
}

TEST(Evaluate, EmptyPredictionsScoreZero) {
  std::vector<corpus::VideoAnnotation> ann{
      {"f", 10, 1, {{1, 2}}, corpus::ModalityType::kAudioVisual}};
  const auto r = evaluate({}, ann, eval_preset("av1m"));
  for (double ap : r.ap) EXPECT_EQ(ap, 0.0);
  EXPECT_EQ(r.ap_avg, 0.0);
}

TEST(Evaluate, UnknownOrDuplicateVideoRejected) {
  std::vector<corpus::VideoAnnotation> ann{{"g", 10, 0, {}, corpus::ModalityType::kReal}};
  EXPECT_THROW(evaluate({{"nope", {}}}, ann, eval_preset("lavdf")), ValidationError);
  EXPECT_THROW(evaluate({{"g", {}}, {"g", {}}}, ann, eval_preset("lavdf")), ValidationError);
}

TEST(Evaluate, MatchesOracleOnRandomInstances) {
  Xoshiro256 rng(4);
  const auto cfg = eval_preset("av1m");
  for (int i = 0; i < 100; ++i) {
    const auto in = mdp::testing::random_eval_input(rng, i % 2 == 1);
    expect_same(evaluate(in, cfg), oracle_evaluate(in, cfg), 1e-9);
  }
}

TEST(Evaluate, OracleAgreesOnAllEqualScores) {
  Xoshiro256 rng(5);
  const auto cfg = eval_preset("lavdf");
  for (int i = 0; i < 50; ++i) {
    auto in = mdp::testing::random_eval_input(rng, true);
    for (auto& [id, preds] : in.preds) {
      for (auto& p : preds) p.score = 0.5;
    }
    expect_same(evaluate(in, cfg), oracle_evaluate(in, cfg), 1e-9);
  }
}

TEST(Evaluate, OracleReproducesHandExamples) {
  const auto cfg = eval_preset("lavdf");
  EXPECT_DOUBLE_EQ(oracle_evaluate(one_video({{1, 3}}, {{{1, 3}, 0.9}}), cfg).ap[0], 1.0);
  EXPECT_DOUBLE_EQ(
      oracle_evaluate(one_video({{0, 1}}, {{{0.4, 1.0}, 0.9}, {{5, 6}, 0.8}}), cfg).ap[0], 1.0);
  EXPECT_DOUBLE_EQ(oracle_evaluate(one_video({{0, 1}}, {{{0.7, 1.0}, 0.9}}), cfg).ap[0], 0.0);
}

TEST(Report, CsvColumnsAndFiles) {
  std::vector<corpus::VideoAnnotation> ann{
      {"f", 10, 1, {{1, 2}}, corpus::ModalityType::kAudioVisual}};
  const auto r = evaluate({{"f", {{{1, 2}, 0.5}}}}, ann, eval_preset("lavdf"));
  EXPECT_EQ(report_csv_header(r), "ap@0.5,ap@0.75,ap@0.95,ap_avg,ar@20,ar@10,ar@5,ar@2,ar_avg");
  EXPECT_EQ(report_csv_values(r).substr(0, 9), "1.000000,");
  mdp::testing::TempDir dir;
  write_report_json(dir / "r.json", r);
  write_report_csv(dir / "r.csv", r);
  EXPECT_FALSE(mdp::testing::read_bytes(dir / "r.json").empty());
  EXPECT_FALSE(mdp::testing::read_bytes(dir / "r.csv").empty());
}

}  // namespace
}  // namespace mdp::metrics
