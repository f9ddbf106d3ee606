#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdp/corpus.hpp"
#include "mdp/localize.hpp"

namespace mdp::metrics {

using corpus::SegmentSpan;
using localize::SegmentProposal;

struct EvalConfig {
  std::string preset = "lavdf";
  std::vector<double> ap_iou_grid{0.5, 0.75, 0.95};
  std::vector<std::size_t> ar_k_list{20, 10, 5, 2};
  std::vector<double> ar_iou_grid;  // filled by the preset: 0.50:0.05:0.95
};

// "lavdf" -> AP at {0.5, 0.75, 0.95}; "av1m" -> AP at {0.1, ..., 0.7}.
EvalConfig eval_preset(std::string_view name);
std::vector<double> default_ar_iou_grid();
void validate(const EvalConfig& cfg);

// |a ∩ b| / |a ∪ b|, 0 when disjoint.
double segment_iou(const SegmentSpan& a, const SegmentSpan& b);

// Ground truth and predictions keyed by video id. Every video that appears
// in `gts` (possibly with no segments) is part of the evaluation.
struct EvalInput {
  std::map<std::string, std::vector<SegmentSpan>> gts;
  std::map<std::string, std::vector<SegmentProposal>> preds;
};

// Pooled, score-ranked, greedy max-IoU matching; all-point interpolation.
// No GT and no predictions -> 1; no GT but some predictions -> 0.
double average_precision(const EvalInput& in, double tau);

// Top-k proposals per video, recall averaged over the IoU grid, then over
// videos that have at least one GT segment (0 if there are none).
double average_recall_at_k(const EvalInput& in, std::size_t k,
                           std::span<const double> iou_grid);

struct EvalReport {
  std::vector<double> ap_thresholds;
  std::vector<double> ap;
  double ap_avg = 0.0;
  std::vector<std::size_t> ar_k;
  std::vector<double> ar;
  double ar_avg = 0.0;
  std::size_t n_videos = 0;
  std::size_t n_gt = 0;
  std::size_t n_predictions = 0;
};

// Throws ValidationError for predictions of videos missing from the
// annotations.
EvalInput make_input(const std::vector<localize::VideoPredictions>& predictions,
                     const std::vector<corpus::VideoAnnotation>& annotations);

EvalReport evaluate(const EvalInput& in, const EvalConfig& cfg);
EvalReport evaluate(const std::vector<localize::VideoPredictions>& predictions,
                    const std::vector<corpus::VideoAnnotation>& annotations,
                    const EvalConfig& cfg);
EvalReport evaluate_files(const std::filesystem::path& predictions,
                          const std::filesystem::path& annotations, const EvalConfig& cfg);

// Brute-force re-derivation of evaluate() sharing no code with it. Slow;
// intended for tests.
EvalReport oracle_evaluate(const EvalInput& in, const EvalConfig& cfg);

// CSV columns: ap@<tau>..., ap_avg, ar@<k>..., ar_avg
std::string report_csv_header(const EvalReport& r);
std::string report_csv_values(const EvalReport& r);
void write_report_json(const std::filesystem::path& path, const EvalReport& r);
void write_report_csv(const std::filesystem::path& path, const EvalReport& r);

}  // namespace mdp::metrics
