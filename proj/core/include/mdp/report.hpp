#pragma once

#include <span>
#include <string>
#include <vector>

#include "mdp/corpus.hpp"
#include "mdp/localize.hpp"

namespace mdp::report {

// t,start_s,end_s,p_genuine,p_forged — one row per FAS step.
std::string timeline_csv(const localize::ForgeryActivationSequence& fas);

// Bar timeline of one video: ground-truth spans on the top lane, decoded
// spans on the middle lane, and the forged probability as a step plot.
std::string timeline_svg(const std::string& video_id,
                         const localize::ForgeryActivationSequence& fas,
                         std::span<const corpus::SegmentSpan> ground_truth,
                         std::span<const corpus::SegmentSpan> predicted);

}  // namespace mdp::report
