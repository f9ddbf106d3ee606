#include "mdp/localize.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "json_util.hpp"
#include "mdp/error.hpp"

namespace mdp::localize {
using detail::json;

NodeRef fas_head(Graph& g, NodeRef features, const HeadNodes& head) {
  const Tensor2D& x = g.value(features);
  const Tensor2D& w = g.value(head.w);
  if (w.rows() != x.cols() || w.cols() != 2) {
    throw DimensionError("fas_head: weights must be " + std::to_string(x.cols()) +
                         "x2, got " + w.shape_string());
  }
  const NodeRef logits = add_row_vector(g, matmul(g, features, head.w), head.b);
  return softmax(g, logits, Axis::kRow);
}

NodeRef video_score(Graph& g, NodeRef probs) {
  return normalize_l1_rows(g, reduce(g, probs, Axis::kCol, ReduceKind::kMean));
}

ForgeryActivationSequence fas_head(const interact::ComprehensiveFeatures& x,
                                   const HeadWeights& head) {
  Graph g;
  const NodeRef p = fas_head(g, g.constant(x.x), {g.constant(head.w), g.constant(head.b)});
  return {g.value(p), x.duration_s};
}

std::array<double, 2> video_score(const ForgeryActivationSequence& fas) {
  if (fas.steps() == 0) throw ContractError("video_score: empty FAS");
  double g = 0.0, f = 0.0;
  for (std::size_t t = 0; t < fas.steps(); ++t) {
    g += fas.probs(t, 0);
    f += fas.probs(t, 1);
  }
  const double n = static_cast<double>(fas.steps());
  g /= n;
  f /= n;
  const double s = g + f;
  return {g / s, f / s};
}

namespace {

// Inclusive step ranges [first, last] of maximal runs above theta.
std::vector<std::pair<std::size_t, std::size_t>> forged_runs(
    const ForgeryActivationSequence& fas, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ContractError("decode threshold must lie in (0, 1), got " + std::to_string(theta));
  }
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  const std::size_t n = fas.steps();
  std::size_t t = 0;
  while (t < n) {
    if (fas.forged(t) > theta) {
      const std::size_t first = t;
      while (t < n && fas.forged(t) > theta) ++t;
      runs.emplace_back(first, t - 1);
    } else {
      ++t;
    }
  }
  return runs;
}

SegmentSpan run_span(const ForgeryActivationSequence& fas, std::size_t first,
                     std::size_t last) {
  const double step = fas.step_seconds();
  return {static_cast<double>(first) * step, static_cast<double>(last + 1) * step};
}

}  // namespace

std::vector<SegmentSpan> decode_segments(const ForgeryActivationSequence& fas, double theta) {
  std::vector<SegmentSpan> out;
  for (const auto& [first, last] : forged_runs(fas, theta)) {
    out.push_back(run_span(fas, first, last));
  }
  return out;
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<SegmentProposal> rank_proposals(const ForgeryActivationSequence& fas,
                                            std::span<const double> theta_grid) {
  if (theta_grid.empty()) throw ContractError("rank_proposals: empty threshold grid");
  std::set<std::pair<std::size_t, std::size_t>> extents;
  for (double theta : theta_grid) {
    for (const auto& run : forged_runs(fas, theta)) extents.insert(run);
  }
  struct Scored {
    std::size_t first, last;
    double score;
  };
  std::vector<Scored> scored;
  for (const auto& [first, last] : extents) {
    double s = 0.0;
    for (std::size_t t = first; t <= last; ++t) s += fas.forged(t);
    scored.push_back({first, last, s / static_cast<double>(last - first + 1)});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.first != b.first) return a.first < b.first;
    return a.last > b.last;
  });
  std::vector<SegmentProposal> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back({run_span(fas, s.first, s.last), s.score});
  return out;
}

// ------------------------------------------------------------------ io --

namespace {
using Reader = detail::ObjectReader<ValidationError>;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<VideoPredictions>& predictions) {
  json arr = json::array();
  for (const auto& v : predictions) {
    json props = json::array();
    for (const auto& p : v.proposals) {
      props.push_back({{"start_s", p.span.start_s}, {"end_s", p.span.end_s}, {"score", p.score}});
    }
    arr.push_back({{"video_id", v.video_id}, {"proposals", props}});
  }
  detail::save_json_file(path, json{{"predictions", arr}});
}

std::vector<VideoPredictions> read_predictions(const std::filesystem::path& path) {
  const json doc = detail::load_json_file(path);
  Reader top(doc, "");
  const json& arr = top.required("predictions");
  if (!arr.is_array()) Reader::fail("predictions", "expected an array");
  std::vector<VideoPredictions> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "predictions[" + std::to_string(i) + "]";
    Reader r(arr[i], where);
    VideoPredictions v;
    v.video_id = r.get<std::string>("video_id");
    if (!ids.insert(v.video_id).second) {
      throw ValidationError("predictions: duplicate video_id '" + v.video_id + "'");
    }
    const json& props = r.required("proposals");
    if (!props.is_array()) Reader::fail(where + ".proposals", "expected an array");
    for (std::size_t k = 0; k < props.size(); ++k) {
      Reader pr(props[k], where + ".proposals[" + std::to_string(k) + "]");
      SegmentProposal p{{pr.get<double>("start_s"), pr.get<double>("end_s")},
                        pr.get<double>("score")};
      pr.reject_unknown();
      if (!(p.span.start_s >= 0.0 && p.span.start_s < p.span.end_s)) {
        throw ValidationError("video '" + v.video_id + "': invalid proposal span");
      }
      if (!std::isfinite(p.score)) {
        throw ValidationError("video '" + v.video_id + "': non-finite proposal score");
      }
      v.proposals.push_back(p);
    }
    r.reject_unknown();
    out.push_back(std::move(v));
  }
  top.reject_unknown();
  return out;
}

void write_activations(const std::filesystem::path& path,
                       const std::vector<VideoActivation>& videos) {
  json arr = json::array();
  for (const auto& v : videos) {
    json probs = json::array();
    for (std::size_t t = 0; t < v.fas.steps(); ++t) {
      probs.push_back({v.fas.probs(t, 0), v.fas.probs(t, 1)});
    }
    arr.push_back({{"video_id", v.video_id}, {"duration_s", v.fas.duration_s}, {"probs", probs}});
  }
  detail::save_json_file(path, json{{"videos", arr}});
}

std::vector<VideoActivation> read_activations(const std::filesystem::path& path) {
  const json doc = detail::load_json_file(path);
  Reader top(doc, "");
  const json& arr = top.required("videos");
  if (!arr.is_array()) Reader::fail("videos", "expected an array");
  std::vector<VideoActivation> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "videos[" + std::to_string(i) + "]";
    Reader r(arr[i], where);
    VideoActivation v;
    v.video_id = r.get<std::string>("video_id");
    v.fas.duration_s = r.get<double>("duration_s");
    const json& probs = r.required("probs");
    if (!probs.is_array()) Reader::fail(where + ".probs", "expected an array");
    v.fas.probs = Tensor2D(probs.size(), 2);
    for (std::size_t t = 0; t < probs.size(); ++t) {
      const json& row = probs[t];
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
        Reader::fail(where + ".probs[" + std::to_string(t) + "]", "expected [p_genuine, p_forged]");
      }
      v.fas.probs(t, 0) = row[0].get<double>();
      v.fas.probs(t, 1) = row[1].get<double>();
    }
    r.reject_unknown();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace mdp::localize
