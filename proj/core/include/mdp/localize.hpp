#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdp/corpus.hpp"
#include "mdp/graph.hpp"
#include "mdp/interact.hpp"

namespace mdp::localize {

using corpus::SegmentSpan;

// Affine map 4d -> 2 followed by a per-row softmax.
struct HeadWeights {
  Tensor2D w;  // 4d x 2
  Tensor2D b;  // 1 x 2
};

struct HeadNodes {
  NodeRef w, b;
};

// Column 0 is the genuine probability, column 1 the forged probability.
struct ForgeryActivationSequence {
  Tensor2D probs;  // T x 2
  double duration_s = 0.0;

  std::size_t steps() const { return probs.rows(); }
  double forged(std::size_t t) const { return probs(t, 1); }
  double step_seconds() const { return duration_s / static_cast<double>(steps()); }
};

struct SegmentProposal {
  SegmentSpan span;
  double score = 0.0;
  friend bool operator==(const SegmentProposal&, const SegmentProposal&) = default;
};

NodeRef fas_head(Graph& g, NodeRef features, const HeadNodes& head);
// Mean of the FAS rows, L1-renormalized; 1 x 2.
NodeRef video_score(Graph& g, NodeRef probs);

ForgeryActivationSequence fas_head(const interact::ComprehensiveFeatures& x,
                                   const HeadWeights& head);
std::array<double, 2> video_score(const ForgeryActivationSequence& fas);

inline constexpr double kDefaultTheta = 0.5;

// Maximal runs of steps with forged probability > theta, as time spans.
std::vector<SegmentSpan> decode_segments(const ForgeryActivationSequence& fas,
                                         double theta = kDefaultTheta);

// {0.1, 0.2, ..., 0.9}
std::vector<double> default_theta_grid();

// Union of decode_segments over the grid with identical extents merged,
// scored by mean forged probability, sorted by score desc, then earlier
// start, then longer span.
std::vector<SegmentProposal> rank_proposals(const ForgeryActivationSequence& fas,
                                            std::span<const double> theta_grid);

struct VideoPredictions {
  std::string video_id;
  std::vector<SegmentProposal> proposals;
};

// {"predictions":[{"video_id","proposals":[{"start_s","end_s","score"}]}]}
void write_predictions(const std::filesystem::path& path,
                       const std::vector<VideoPredictions>& predictions);
std::vector<VideoPredictions> read_predictions(const std::filesystem::path& path);

struct VideoActivation {
  std::string video_id;
  ForgeryActivationSequence fas;
};

// {"videos":[{"video_id","duration_s","probs":[[p_genuine,p_forged],...]}]}
void write_activations(const std::filesystem::path& path,
                       const std::vector<VideoActivation>& videos);
std::vector<VideoActivation> read_activations(const std::filesystem::path& path);

}  // namespace mdp::localize
