#include "mdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "json_util.hpp"
#include "mdp/error.hpp"

namespace mdp::metrics {
using detail::json;

std::vector<double> default_ar_iou_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back((10 + i) / 20.0);
  return grid;
}

EvalConfig eval_preset(std::string_view name) {
  EvalConfig cfg;
  cfg.preset = std::string(name);
  cfg.ar_iou_grid = default_ar_iou_grid();
  if (name == "lavdf") {
    cfg.ap_iou_grid = {0.5, 0.75, 0.95};
  } else if (name == "av1m") {
    cfg.ap_iou_grid.clear();
    for (int i = 1; i <= 7; ++i) cfg.ap_iou_grid.push_back(i / 10.0);
  } else {
    throw ConfigError("eval.preset: unknown preset '" + std::string(name) +
                      "' (expected lavdf or av1m)");
  }
  return cfg;
}

void validate(const EvalConfig& cfg) {
  auto check_grid = [](const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw ConfigError(std::string("eval.") + name + ": grid is empty");
    for (double t : grid) {
      if (!(t > 0.0 && t <= 1.0)) {
        throw ConfigError(std::string("eval.") + name + ": thresholds must lie in (0, 1]");
      }
    }
  };
  check_grid(cfg.ap_iou_grid, "ap_iou_grid");
  check_grid(cfg.ar_iou_grid, "ar_iou_grid");
  if (cfg.ar_k_list.empty()) throw ConfigError("eval.ar_k_list: empty");
  for (std::size_t k : cfg.ar_k_list) {
    if (k == 0) throw ConfigError("eval.ar_k_list: k must be > 0");
  }
}

double segment_iou(const SegmentSpan& a, const SegmentSpan& b) {
  const double inter = std::min(a.end_s, b.end_s) - std::max(a.start_s, b.start_s);
  if (inter <= 0.0) return 0.0;
  const double uni = (a.end_s - a.start_s) + (b.end_s - b.start_s) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

struct Ranked {
  const std::string* video;
  const SegmentProposal* pred;
  std::size_t order;  // position in the pooled input, last tie-break
};

bool ranks_before(const Ranked& a, const Ranked& b) {
  if (a.pred->score != b.pred->score) return a.pred->score > b.pred->score;
  if (a.pred->span.start_s != b.pred->span.start_s) {
    return a.pred->span.start_s < b.pred->span.start_s;
  }
  if (*a.video != *b.video) return *a.video < *b.video;
  return a.order < b.order;
}

// Index of the unmatched GT with maximal IoU >= tau (lowest index on ties),
// or -1.
long best_match(const SegmentSpan& p, const std::vector<SegmentSpan>& gts,
                const std::vector<char>& used, double tau) {
  long best = -1;
  double best_iou = -1.0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (used[g]) continue;
    const double iou = segment_iou(p, gts[g]);
    if (iou >= tau && iou > best_iou) {
      best_iou = iou;
      best = static_cast<long>(g);
    }
  }
  return best;
}

std::vector<SegmentProposal> sorted_by_score(std::vector<SegmentProposal> props) {
  std::stable_sort(props.begin(), props.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.span.start_s < b.span.start_s;
  });
  return props;
}

}  // namespace

double average_precision(const EvalInput& in, double tau) {
  std::size_t n_gt = 0;
  for (const auto& [id, spans] : in.gts) n_gt += spans.size();

  std::vector<Ranked> ranked;
  for (const auto& [id, props] : in.preds) {
    for (const auto& p : props) ranked.push_back({&id, &p, ranked.size()});
  }
  if (n_gt == 0) return ranked.empty() ? 1.0 : 0.0;
  if (ranked.empty()) return 0.0;
  std::sort(ranked.begin(), ranked.end(), ranks_before);

  std::map<std::string, std::vector<char>> used;
  for (const auto& [id, spans] : in.gts) used[id].assign(spans.size(), 0);

  std::vector<double> precision(ranked.size()), recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto gt = in.gts.find(*ranked[i].video);
    if (gt != in.gts.end()) {
      auto& flags = used[gt->first];
      const long m = best_match(ranked[i].pred->span, gt->second, flags, tau);
      if (m >= 0) {
        flags[static_cast<std::size_t>(m)] = 1;
        ++tp;
      }
    }
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  for (std::size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

double average_recall_at_k(const EvalInput& in, std::size_t k,
                           std::span<const double> iou_grid) {
  if (iou_grid.empty()) throw ContractError("average_recall_at_k: empty IoU grid");
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& [id, gts] : in.gts) {
    if (gts.empty()) continue;
    ++counted;
    std::vector<SegmentProposal> top;
    if (const auto it = in.preds.find(id); it != in.preds.end()) {
      top = sorted_by_score(it->second);
      if (top.size() > k) top.resize(k);
    }
    double per_video = 0.0;
    for (double tau : iou_grid) {
      std::vector<char> used(gts.size(), 0);
      std::size_t matched = 0;
      for (const auto& p : top) {
        const long m = best_match(p.span, gts, used, tau);
        if (m >= 0) {
          used[static_cast<std::size_t>(m)] = 1;
          ++matched;
        }
      }
      per_video += static_cast<double>(matched) / static_cast<double>(gts.size());
    }
    total += per_video / static_cast<double>(iou_grid.size());
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

EvalInput make_input(const std::vector<localize::VideoPredictions>& predictions,
                     const std::vector<corpus::VideoAnnotation>& annotations) {
  EvalInput in;
  for (const auto& a : annotations) {
    if (!in.gts.emplace(a.video_id, a.segments).second) {
      throw ValidationError("annotations: duplicate video_id '" + a.video_id + "'");
    }
  }
  for (const auto& p : predictions) {
    if (!in.gts.count(p.video_id)) {
      throw ValidationError("predictions: unknown video_id '" + p.video_id + "'");
    }
    if (!in.preds.emplace(p.video_id, p.proposals).second) {
      throw ValidationError("predictions: duplicate video_id '" + p.video_id + "'");
    }
  }
  return in;
}

EvalReport evaluate(const EvalInput& in, const EvalConfig& cfg) {
  validate(cfg);
  EvalReport r;
  r.ap_thresholds = cfg.ap_iou_grid;
  for (double tau : cfg.ap_iou_grid) r.ap.push_back(average_precision(in, tau));
  r.ap_avg = std::accumulate(r.ap.begin(), r.ap.end(), 0.0) / static_cast<double>(r.ap.size());
  r.ar_k = cfg.ar_k_list;
  for (std::size_t k : cfg.ar_k_list) {
    r.ar.push_back(average_recall_at_k(in, k, cfg.ar_iou_grid));
  }
  r.ar_avg = std::accumulate(r.ar.begin(), r.ar.end(), 0.0) / static_cast<double>(r.ar.size());
  r.n_videos = in.gts.size();
  for (const auto& [id, spans] : in.gts) r.n_gt += spans.size();
  for (const auto& [id, props] : in.preds) r.n_predictions += props.size();
  return r;
}

EvalReport evaluate(const std::vector<localize::VideoPredictions>& predictions,
                    const std::vector<corpus::VideoAnnotation>& annotations,
                    const EvalConfig& cfg) {
  return evaluate(make_input(predictions, annotations), cfg);
}

EvalReport evaluate_files(const std::filesystem::path& predictions,
                          const std::filesystem::path& annotations, const EvalConfig& cfg) {
  return evaluate(localize::read_predictions(predictions), corpus::read_annotations(annotations),
                  cfg);
}

std::string report_csv_header(const EvalReport& r) {
  std::string out;
  for (double t : r.ap_thresholds) out += fmt::format("ap@{:g},", t);
  out += "ap_avg";
  for (std::size_t k : r.ar_k) out += fmt::format(",ar@{}", k);
  out += ",ar_avg";
  return out;
}

std::string report_csv_values(const EvalReport& r) {
  std::string out;
  for (double v : r.ap) out += fmt::format("{:.6f},", v);
  out += fmt::format("{:.6f}", r.ap_avg);
  for (double v : r.ar) out += fmt::format(",{:.6f}", v);
  out += fmt::format(",{:.6f}", r.ar_avg);
  return out;
}

void write_report_json(const std::filesystem::path& path, const EvalReport& r) {
  json ap = json::object(), ar = json::object();
  for (std::size_t i = 0; i < r.ap.size(); ++i) ap[fmt::format("{:g}", r.ap_thresholds[i])] = r.ap[i];
  for (std::size_t i = 0; i < r.ar.size(); ++i) ar[std::to_string(r.ar_k[i])] = r.ar[i];
  detail::save_json_file(path, json{{"ap", ap},
                                    {"ap_avg", r.ap_avg},
                                    {"ar", ar},
                                    {"ar_avg", r.ar_avg},
                                    {"counts",
                                     {{"videos", r.n_videos},
                                      {"gt_segments", r.n_gt},
                                      {"predictions", r.n_predictions}}}});
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& r) {
  detail::write_text_file(path, report_csv_header(r) + "\n" + report_csv_values(r) + "\n");
}

}  // namespace mdp::metrics
