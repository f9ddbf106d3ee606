// Deliberately naive scorer: selection-sort ranking, exhaustive scans, and
// precision envelopes recomputed from scratch at every rank. Shares nothing
// with metrics.cpp beyond the public types.

#include <vector>

#include "mdp/error.hpp"
#include "mdp/metrics.hpp"

namespace mdp::metrics {

namespace {

double overlap_ratio(double a0, double a1, double b0, double b1) {
  const double lo = a0 > b0 ? a0 : b0;
  const double hi = a1 < b1 ? a1 : b1;
  if (!(hi > lo)) return 0.0;
  const double uni = (a1 - a0) + (b1 - b0) - (hi - lo);
  if (!(uni > 0.0)) return 0.0;
  return (hi - lo) / uni;
}

struct Item {
  std::string video;
  double start, end, score;
};

// true if x must be ranked ahead of y
bool ahead(const Item& x, std::size_t xi, const Item& y, std::size_t yi) {
  if (x.score > y.score) return true;
  if (x.score < y.score) return false;
  if (x.start < y.start) return true;
  if (x.start > y.start) return false;
  if (x.video < y.video) return true;
  if (x.video > y.video) return false;
  return xi < yi;
}

std::vector<std::size_t> selection_rank(const std::vector<Item>& items) {
  std::vector<char> taken(items.size(), 0);
  std::vector<std::size_t> order;
  for (std::size_t round = 0; round < items.size(); ++round) {
    std::size_t pick = items.size();
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (taken[j]) continue;
      if (pick == items.size() || ahead(items[j], j, items[pick], pick)) pick = j;
    }
    taken[pick] = 1;
    order.push_back(pick);
  }
  return order;
}

double oracle_ap(const EvalInput& in, double tau) {
  std::vector<Item> items;
  for (const auto& [id, props] : in.preds) {
    for (const auto& p : props) items.push_back({id, p.span.start_s, p.span.end_s, p.score});
  }
  // Flatten GT with owning video.
  std::vector<Item> gt;
  for (const auto& [id, spans] : in.gts) {
    for (const auto& s : spans) gt.push_back({id, s.start_s, s.end_s, 0.0});
  }
  if (gt.empty()) return items.empty() ? 1.0 : 0.0;
  if (items.empty()) return 0.0;

  const std::vector<std::size_t> order = selection_rank(items);
  std::vector<char> gt_used(gt.size(), 0);
  std::vector<char> is_tp(order.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Item& p = items[order[r]];
    std::size_t chosen = gt.size();
    double chosen_iou = 0.0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt_used[g] || gt[g].video != p.video) continue;
      const double iou = overlap_ratio(p.start, p.end, gt[g].start, gt[g].end);
      if (iou < tau) continue;
      if (chosen == gt.size() || iou > chosen_iou) {
        chosen = g;
        chosen_iou = iou;
      }
    }
    if (chosen != gt.size()) {
      gt_used[chosen] = 1;
      is_tp[r] = 1;
    }
  }

  // Precision and recall at every rank, each recounted from the prefix.
  const std::size_t n = order.size();
  std::vector<double> prec(n), rec(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q <= r; ++q) hits += is_tp[q];
    prec[r] = static_cast<double>(hits) / static_cast<double>(r + 1);
    rec[r] = static_cast<double>(hits) / static_cast<double>(gt.size());
  }
  double area = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double envelope = 0.0;
    for (std::size_t q = r; q < n; ++q) {
      if (prec[q] > envelope) envelope = prec[q];
    }
    const double step = rec[r] - (r == 0 ? 0.0 : rec[r - 1]);
    area += step * envelope;
  }
  return area;
}

double oracle_ar(const EvalInput& in, std::size_t k, const std::vector<double>& grid) {
  double sum_videos = 0.0;
  std::size_t videos = 0;
  for (const auto& [id, spans] : in.gts) {
    if (spans.empty()) continue;
    videos += 1;
    std::vector<Item> items;
    const auto found = in.preds.find(id);
    if (found != in.preds.end()) {
      for (const auto& p : found->second) {
        // Same video for all; ranking falls back to start then input order.
        items.push_back({id, p.span.start_s, p.span.end_s, p.score});
      }
    }
    const std::vector<std::size_t> order = selection_rank(items);
    const std::size_t take = order.size() < k ? order.size() : k;
    double sum_tau = 0.0;
    for (double tau : grid) {
      std::vector<char> used(spans.size(), 0);
      double hits = 0.0;
      for (std::size_t r = 0; r < take; ++r) {
        const Item& p = items[order[r]];
        std::size_t chosen = spans.size();
        double chosen_iou = 0.0;
        for (std::size_t g = 0; g < spans.size(); ++g) {
          if (used[g]) continue;
          const double iou = overlap_ratio(p.start, p.end, spans[g].start_s, spans[g].end_s);
          if (iou >= tau && (chosen == spans.size() || iou > chosen_iou)) {
            chosen = g;
            chosen_iou = iou;
          }
        }
        if (chosen != spans.size()) {
          used[chosen] = 1;
          hits += 1.0;
        }
      }
      sum_tau += hits / static_cast<double>(spans.size());
    }
    sum_videos += sum_tau / static_cast<double>(grid.size());
  }
  if (videos == 0) return 0.0;
  return sum_videos / static_cast<double>(videos);
}

}  // namespace

EvalReport oracle_evaluate(const EvalInput& in, const EvalConfig& cfg) {
  validate(cfg);
  EvalReport r;
  r.ap_thresholds = cfg.ap_iou_grid;
  r.ar_k = cfg.ar_k_list;
  double s = 0.0;
  for (double tau : cfg.ap_iou_grid) {
    r.ap.push_back(oracle_ap(in, tau));
    s += r.ap.back();
  }
  r.ap_avg = s / static_cast<double>(r.ap.size());
  s = 0.0;
  for (std::size_t k : cfg.ar_k_list) {
    r.ar.push_back(oracle_ar(in, k, cfg.ar_iou_grid));
    s += r.ar.back();
  }
  r.ar_avg = s / static_cast<double>(r.ar.size());
  r.n_videos = in.gts.size();
  for (const auto& [id, spans] : in.gts) r.n_gt += spans.size();
  for (const auto& [id, props] : in.preds) r.n_predictions += props.size();
  return r;
}

}  // namespace mdp::metrics
