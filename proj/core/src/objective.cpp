#include "mdp/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdp/error.hpp"

namespace mdp::objective {

std::string_view to_string(DeviationKind kind) {
  switch (kind) {
    case DeviationKind::kL1: return "L1";
    case DeviationKind::kL2: return "L2";
    case DeviationKind::kMse: return "MSE";
  }
  return "MSE";
}

std::string_view to_string(DeviationReduce reduce) {
  return reduce == DeviationReduce::kMean ? "mean" : "sum";
}

DeviationKind deviation_kind_from_string(std::string_view name) {
  if (name == "L1") return DeviationKind::kL1;
  if (name == "L2") return DeviationKind::kL2;
  if (name == "MSE") return DeviationKind::kMse;
  throw ConfigError("unknown deviation measure '" + std::string(name) +
                    "' (expected L1, L2 or MSE)");
}

DeviationReduce deviation_reduce_from_string(std::string_view name) {
  if (name == "mean") return DeviationReduce::kMean;
  if (name == "sum") return DeviationReduce::kSum;
  throw ConfigError("unknown deviation reduce '" + std::string(name) + "' (expected mean or sum)");
}

double deviation_measure(std::span<const double> u, std::span<const double> w,
                         DeviationKind kind) {
  if (u.size() != w.size()) {
    throw DimensionError("deviation_measure: dims " + std::to_string(u.size()) + " and " +
                         std::to_string(w.size()) + " differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = u[i] - w[i];
    acc += kind == DeviationKind::kL1 ? std::fabs(diff) : diff * diff;
  }
  switch (kind) {
    case DeviationKind::kL1: return acc;
    case DeviationKind::kL2: return std::sqrt(acc);
    case DeviationKind::kMse: return u.empty() ? 0.0 : acc / static_cast<double>(u.size());
  }
  return acc;
}

namespace {
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
double clamp_prob(double p) { return std::clamp(p, kLossEps, 1.0 - kLossEps); }
}  // namespace

double temporal_deviation(const interact::ComprehensiveFeatures& x, DeviationKind kind,
                          DeviationReduce reduce) {
  const std::size_t steps = x.steps();
  if (steps < 2) throw ContractError("temporal_deviation: needs T >= 2");
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < steps; ++t) {
    acc += deviation_measure(x.x.row(t), x.x.row(t + 1), kind);
  }
  if (reduce == DeviationReduce::kMean) acc /= static_cast<double>(steps - 1);
  return logistic(acc);
}

double dp_loss(std::span<const double> deviations, std::span<const int> labels) {
  if (deviations.size() != labels.size()) {
    throw DimensionError("dp_loss: " + std::to_string(deviations.size()) +
                         " deviations for " + std::to_string(labels.size()) + " labels");
  }
  if (deviations.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    const double d = clamp_prob(deviations[i]);
    acc += labels[i] == 1 ? std::log(d) : std::log(1.0 - d);
  }
  return -acc / static_cast<double>(deviations.size());
}

double cls_loss(const std::array<double, 2>& yhat, int label) {
  if (label != 0 && label != 1) throw ContractError("cls_loss: label must be 0 or 1");
  return -std::log(clamp_prob(yhat[static_cast<std::size_t>(label)]));
}

double cls_loss(std::span<const std::array<double, 2>> yhat, std::span<const int> labels) {
  if (yhat.size() != labels.size()) throw DimensionError("cls_loss: length mismatch");
  if (yhat.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < yhat.size(); ++i) acc += cls_loss(yhat[i], labels[i]);
  return acc / static_cast<double>(yhat.size());
}

LossBreakdown total_loss(double l_cls, double l_dp, double phi) {
  if (!(phi >= 0.0)) throw ContractError("total_loss: phi must be >= 0");
  return {l_cls, l_dp, l_cls + phi * l_dp, phi};
}

NodeRef adjacent_deviations(Graph& g, NodeRef x, DeviationKind kind) {
  const std::size_t steps = g.value(x).rows();
  if (steps < 2) throw ContractError("temporal_deviation: needs T >= 2");
  const NodeRef diff = sub(g, slice_rows(g, x, 1, steps), slice_rows(g, x, 0, steps - 1));
  switch (kind) {
    case DeviationKind::kL1:
      return reduce(g, abs(g, diff), Axis::kRow, ReduceKind::kSum);
    case DeviationKind::kL2:
      return sqrt(g, reduce(g, mul(g, diff, diff), Axis::kRow, ReduceKind::kSum));
    case DeviationKind::kMse:
      return reduce(g, mul(g, diff, diff), Axis::kRow, ReduceKind::kMean);
  }
  throw ContractError("unknown deviation kind");
}

NodeRef temporal_deviation(Graph& g, NodeRef x, DeviationKind kind, DeviationReduce r) {
  const NodeRef per_pair = adjacent_deviations(g, x, kind);
  const auto rk = r == DeviationReduce::kMean ? ReduceKind::kMean : ReduceKind::kSum;
  return sigmoid(g, reduce(g, per_pair, Axis::kAll, rk));
}

NodeRef dp_term(Graph& g, NodeRef deviation, int label) {
  const NodeRef d = clamp(g, deviation, kLossEps, 1.0 - kLossEps);
  if (label == 1) return scale(g, log(g, d), -1.0);
  if (label == 0) return scale(g, log(g, shift(g, scale(g, d, -1.0), 1.0)), -1.0);
  throw ContractError("dp_term: label must be 0 or 1");
}

NodeRef cls_term(Graph& g, NodeRef video_score, int label) {
  if (label != 0 && label != 1) throw ContractError("cls_term: label must be 0 or 1");
  const NodeRef p = select(g, video_score, 0, static_cast<std::size_t>(label));
  return scale(g, log(g, clamp(g, p, kLossEps, 1.0 - kLossEps)), -1.0);
}

}  // namespace mdp::objective
