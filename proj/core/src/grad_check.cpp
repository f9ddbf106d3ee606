#include "mdp/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdp/error.hpp"

namespace mdp {
namespace {

double evaluate(const ScalarGraphBuilder& f, const std::vector<Tensor2D>& params,
                std::size_t param_index) {
  Graph g;
  std::vector<NodeRef> refs;
  refs.reserve(params.size());
  for (const auto& p : params) refs.push_back(g.parameter(p));
  double v = 0.0;
  try {
    v = g.value(f(g, refs))(0, 0);
  } catch (const DomainError& e) {
    throw DomainError("grad_check: parameter " + std::to_string(param_index) +
                      ": " + e.what());
  }
  if (!std::isfinite(v)) {
    throw DomainError("grad_check: non-finite value perturbing parameter " +
                      std::to_string(param_index));
  }
  return v;
}

}  // namespace

GradCheckResult grad_check(const ScalarGraphBuilder& f,
                           const std::vector<Tensor2D>& params,
                           const GradCheckOptions& options) {
  if (!(options.h > 0.0)) throw ContractError("grad_check: h must be > 0");

  Graph g;
  if (options.corrupt) g.corrupt_gradient(options.corrupt->first, options.corrupt->second);
  std::vector<NodeRef> refs;
  for (const auto& p : params) refs.push_back(g.parameter(p));
  const NodeRef loss = f(g, refs);
  g.backward(loss);

  GradCheckResult result;
  std::vector<Tensor2D> work = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Tensor2D analytic = g.grad(refs[p]);
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double orig = params[p].data()[i];
      work[p].data()[i] = orig + options.h;
      const double plus = evaluate(f, work, p);
      work[p].data()[i] = orig - options.h;
      const double minus = evaluate(f, work, p);
      work[p].data()[i] = orig;

      const double numeric = (plus - minus) / (2.0 * options.h);
      const double a = analytic.data()[i];
      const double err = std::fabs(a - numeric) / std::max(1.0, std::fabs(numeric));
      if (err > result.max_rel_error || (p == 0 && i == 0)) {
        result = {err, p, i, a, numeric};
      }
    }
  }
  return result;
}

}  // namespace mdp
