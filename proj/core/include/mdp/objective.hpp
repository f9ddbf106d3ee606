#pragma once

#include <array>
#include <span>
#include <string_view>

#include "mdp/graph.hpp"
#include "mdp/interact.hpp"

namespace mdp::objective {

// Deviation between adjacent fused feature rows:
//   L1  = sum |u - w|
//   L2  = sqrt(sum (u - w)^2)
//   MSE = mean over dimensions of (u - w)^2
enum class DeviationKind { kL1, kL2, kMse };

// How the T-1 adjacent deviations are combined before the sigmoid.
enum class DeviationReduce { kMean, kSum };

std::string_view to_string(DeviationKind kind);
std::string_view to_string(DeviationReduce reduce);
DeviationKind deviation_kind_from_string(std::string_view name);
DeviationReduce deviation_reduce_from_string(std::string_view name);

// Probabilities are clamped to [kLossEps, 1 - kLossEps] before any log.
inline constexpr double kLossEps = 1e-7;

double deviation_measure(std::span<const double> u, std::span<const double> w,
                         DeviationKind kind);

// sigmoid(reduce_t f(x_t, x_{t+1})) over the T-1 adjacent pairs; in [0.5, 1).
double temporal_deviation(const interact::ComprehensiveFeatures& x, DeviationKind kind,
                          DeviationReduce reduce = DeviationReduce::kMean);

// -(1/N) sum [(1-y) log(1-d) + y log d]
double dp_loss(std::span<const double> deviations, std::span<const int> labels);

// -log(yhat[label]); the batch form is the mean.
double cls_loss(const std::array<double, 2>& yhat, int label);
double cls_loss(std::span<const std::array<double, 2>> yhat, std::span<const int> labels);

struct LossBreakdown {
  double l_cls = 0.0;
  double l_dp = 0.0;
  double total = 0.0;
  double phi = 0.0;
};

// total = l_cls + phi * l_dp
LossBreakdown total_loss(double l_cls, double l_dp, double phi);

// Graph forms used for training. All return 1x1 nodes except
// adjacent_deviations, which is (T-1) x 1.
NodeRef adjacent_deviations(Graph& g, NodeRef x, DeviationKind kind);
NodeRef temporal_deviation(Graph& g, NodeRef x, DeviationKind kind,
                           DeviationReduce reduce = DeviationReduce::kMean);
// Per-sample deviation-perceiving term for one video.
NodeRef dp_term(Graph& g, NodeRef deviation, int label);
// Per-sample cross-entropy on the 1x2 video score.
NodeRef cls_term(Graph& g, NodeRef video_score, int label);

}  // namespace mdp::objective
