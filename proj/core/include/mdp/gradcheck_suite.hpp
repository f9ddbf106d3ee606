#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdp/graph.hpp"

namespace mdp {

struct GradCheckEntry {
  std::string name;  // primitive op name, or "mdp_loss"
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 1e-4;
  bool all_passed() const;
};

// Checks every graph primitive once plus the full training objective
// (T=8, d=4, 2-video batch, both loss terms, cross-modal attention on).
// `corrupt` scales one op's backward pass to show the checks bite.
GradCheckReport run_gradcheck_suite(std::optional<std::pair<OpKind, double>> corrupt = {},
                                    double tolerance = 1e-4);

}  // namespace mdp
