#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mdp/graph.hpp"

namespace mdp {

// Builds a scalar (1x1) function of the given parameter nodes.
using ScalarGraphBuilder =
    std::function<NodeRef(Graph& graph, std::span<const NodeRef> params)>;

struct GradCheckOptions {
  double h = 1e-5;
  // Injected into the analytic pass only (mutation testing).
  std::optional<std::pair<OpKind, double>> corrupt;
};

struct GradCheckResult {
  // max over entries of |analytic - fd| / max(1, |fd|)
  double max_rel_error = 0.0;
  std::size_t param_index = 0;
  std::size_t entry_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares reverse-mode gradients against central finite differences.
// Throws DomainError (naming the parameter index) when a perturbed
// evaluation produces a non-finite value.
GradCheckResult grad_check(const ScalarGraphBuilder& f,
                           const std::vector<Tensor2D>& params,
                           const GradCheckOptions& options = {});

}  // namespace mdp
