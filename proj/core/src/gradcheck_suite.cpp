#include "mdp/gradcheck_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mdp/grad_check.hpp"
#include "mdp/model.hpp"
#include "mdp/rng.hpp"

namespace mdp {

bool GradCheckReport::all_passed() const {
  for (const auto& e : entries) {
    if (!e.passed) return false;
  }
  return !entries.empty();
}

namespace {

Tensor2D random(Xoshiro256& rng, std::size_t r, std::size_t c, double lo = -1.0,
                double hi = 1.0) {
  Tensor2D t(r, c);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Random entries kept at least `gap` away from each point in `kinks`.
Tensor2D away_from(Xoshiro256& rng, std::size_t r, std::size_t c,
                   std::initializer_list<double> kinks, double gap = 0.05) {
  Tensor2D t(r, c);
  for (double& v : t.data()) {
    bool ok = false;
    while (!ok) {
      v = rng.uniform(-1.0, 1.0);
      ok = true;
      for (double k : kinks) ok = ok && std::fabs(v - k) > gap;
    }
  }
  return t;
}

// sum(W ∘ out) for a fixed random W: turns any op output into a scalar
// whose gradient reaches every output entry with a distinct weight.
NodeRef weighted_sum(Graph& g, NodeRef out, const Tensor2D& w) {
  return reduce(g, mul(g, out, g.constant(w)), Axis::kAll, ReduceKind::kSum);
}

struct Case {
  OpKind op;
  std::vector<Tensor2D> params;
  ScalarGraphBuilder build;
};

// Wraps `op_out` (which may return several nodes) into a weighted scalar.
ScalarGraphBuilder weighted(Xoshiro256& rng,
                            std::function<std::vector<NodeRef>(Graph&, std::span<const NodeRef>)> op,
                            std::vector<std::pair<std::size_t, std::size_t>> shapes) {
  std::vector<Tensor2D> weights;
  for (auto [r, c] : shapes) weights.push_back(random(rng, r, c));
  return [op = std::move(op), weights](Graph& g, std::span<const NodeRef> p) {
    const std::vector<NodeRef> outs = op(g, p);
    NodeRef total = weighted_sum(g, outs[0], weights[0]);
    for (std::size_t i = 1; i < outs.size(); ++i) {
      total = add(g, total, weighted_sum(g, outs[i], weights[i]));
    }
    return total;
  };
}

std::vector<Case> primitive_cases(Xoshiro256& rng) {
  std::vector<Case> cases;
  auto unary = [&](OpKind op, Tensor2D x, std::function<NodeRef(Graph&, NodeRef)> f) {
    Graph probe;
    const Tensor2D& y = probe.value(f(probe, probe.constant(x)));
    const auto shape = std::pair{y.rows(), y.cols()};
    cases.push_back({op, {std::move(x)},
                     weighted(rng, [f](Graph& g, std::span<const NodeRef> p) {
                       return std::vector<NodeRef>{f(g, p[0])};
                     }, {shape})});
  };
  auto binary = [&](OpKind op, Tensor2D a, Tensor2D b, std::size_t out_r, std::size_t out_c,
                    std::function<NodeRef(Graph&, NodeRef, NodeRef)> f) {
    cases.push_back({op, {std::move(a), std::move(b)},
                     weighted(rng, [f](Graph& g, std::span<const NodeRef> p) {
                       return std::vector<NodeRef>{f(g, p[0], p[1])};
                     }, {{out_r, out_c}})});
  };

  binary(OpKind::kMatMul, random(rng, 3, 4), random(rng, 4, 2), 3, 2,
         [](Graph& g, NodeRef a, NodeRef b) { return matmul(g, a, b); });
  unary(OpKind::kTranspose, random(rng, 3, 4), [](Graph& g, NodeRef a) { return transpose(g, a); });
  binary(OpKind::kAdd, random(rng, 3, 4), random(rng, 3, 4), 3, 4,
         [](Graph& g, NodeRef a, NodeRef b) { return add(g, a, b); });
  binary(OpKind::kSub, random(rng, 3, 4), random(rng, 3, 4), 3, 4,
         [](Graph& g, NodeRef a, NodeRef b) { return sub(g, a, b); });
  binary(OpKind::kMul, random(rng, 3, 4), random(rng, 3, 4), 3, 4,
         [](Graph& g, NodeRef a, NodeRef b) { return mul(g, a, b); });
  unary(OpKind::kScale, random(rng, 3, 4), [](Graph& g, NodeRef a) { return scale(g, a, 1.7); });
  unary(OpKind::kShift, random(rng, 3, 4), [](Graph& g, NodeRef a) { return shift(g, a, 0.3); });
  unary(OpKind::kRelu, away_from(rng, 3, 4, {0.0}), [](Graph& g, NodeRef a) { return relu(g, a); });
  unary(OpKind::kSigmoid, random(rng, 3, 4, -3, 3), [](Graph& g, NodeRef a) { return sigmoid(g, a); });
  unary(OpKind::kLog, random(rng, 3, 4, 0.5, 2.0), [](Graph& g, NodeRef a) { return log(g, a); });
  unary(OpKind::kAbs, away_from(rng, 3, 4, {0.0}), [](Graph& g, NodeRef a) { return abs(g, a); });
  unary(OpKind::kSqrt, random(rng, 3, 4, 0.5, 2.0), [](Graph& g, NodeRef a) { return sqrt(g, a); });
  unary(OpKind::kClamp, away_from(rng, 3, 4, {-0.5, 0.5}),
        [](Graph& g, NodeRef a) { return clamp(g, a, -0.5, 0.5); });

  {
    Tensor2D x = random(rng, 3, 4, -2, 2);
    cases.push_back({OpKind::kSoftmax, {std::move(x)},
                     weighted(rng, [](Graph& g, std::span<const NodeRef> p) {
                       return std::vector<NodeRef>{softmax(g, p[0], Axis::kRow),
                                                   softmax(g, p[0], Axis::kCol)};
                     }, {{3, 4}, {3, 4}})});
  }
  {
    std::vector<Tensor2D> p{random(rng, 3, 5), random(rng, 1, 5, 0.5, 1.5), random(rng, 1, 5)};
    cases.push_back({OpKind::kLayerNormRows, std::move(p),
                     weighted(rng, [](Graph& g, std::span<const NodeRef> q) {
                       return std::vector<NodeRef>{layer_norm_rows(g, q[0], q[1], q[2])};
                     }, {{3, 5}})});
  }
  {
    Tensor2D x = random(rng, 3, 4);
    cases.push_back({OpKind::kReduce, {std::move(x)},
                     weighted(rng, [](Graph& g, std::span<const NodeRef> p) {
                       std::vector<NodeRef> outs;
                       for (Axis ax : {Axis::kRow, Axis::kCol, Axis::kAll}) {
                         for (ReduceKind k : {ReduceKind::kSum, ReduceKind::kMean}) {
                           outs.push_back(reduce(g, p[0], ax, k));
                         }
                       }
                       return outs;
                     }, {{3, 1}, {3, 1}, {1, 4}, {1, 4}, {1, 1}, {1, 1}})});
  }
  binary(OpKind::kConcatCols, random(rng, 3, 2), random(rng, 3, 3), 3, 5,
         [](Graph& g, NodeRef a, NodeRef b) {
           const NodeRef parts[] = {a, b};
           return concat_cols(g, parts);
         });
  unary(OpKind::kSliceRows, random(rng, 5, 3),
        [](Graph& g, NodeRef a) { return slice_rows(g, a, 1, 4); });
  binary(OpKind::kScaleRows, random(rng, 4, 3), random(rng, 4, 1), 4, 3,
         [](Graph& g, NodeRef a, NodeRef s) { return scale_rows(g, a, s); });
  binary(OpKind::kAddRowVector, random(rng, 4, 3), random(rng, 1, 3), 4, 3,
         [](Graph& g, NodeRef a, NodeRef b) { return add_row_vector(g, a, b); });
  unary(OpKind::kSelect, random(rng, 3, 4), [](Graph& g, NodeRef a) { return select(g, a, 2, 1); });
  unary(OpKind::kNormalizeL1Rows, random(rng, 3, 4, 0.2, 1.5),
        [](Graph& g, NodeRef a) { return normalize_l1_rows(g, a); });
  return cases;
}

GradCheckEntry full_loss_case(Xoshiro256& rng, const GradCheckOptions& options, double tol) {
  const model::ModelDims dims{6, 5, 4, 8};
  model::ModelParams params = model::init_params(dims, rng);
  // Move the zero/one initialised tensors off their defaults so every
  // parameter's gradient path is exercised at a generic point.
  for (auto id : {model::ParamId::kVisualLnGain, model::ParamId::kAudioLnGain}) {
    params[id] = random(rng, 1, 4, 0.5, 1.5);
  }
  for (auto id : {model::ParamId::kVisualLnBias, model::ParamId::kAudioLnBias,
                  model::ParamId::kHeadB}) {
    params[id] = random(rng, params[id].rows(), params[id].cols(), -0.5, 0.5);
  }
  std::vector<model::VideoInputs> videos;
  for (int i = 0; i < 2; ++i) {
    videos.push_back({random(rng, dims.steps, dims.raw_dim_v), random(rng, dims.steps, dims.raw_dim_a),
                      4.0});
  }
  const int labels[] = {0, 1};
  auto build = [videos, labels](Graph& g, std::span<const NodeRef> p) {
    model::ParamNodes nodes;
    for (std::size_t i = 0; i < model::kParamCount; ++i) nodes.refs[i] = p[i];
    NodeRef total{};
    for (std::size_t v = 0; v < videos.size(); ++v) {
      const auto fwd = model::forward(g, nodes, videos[v], {});
      const auto loss = model::sample_loss(g, fwd, labels[v], 0.5, true);
      total = v == 0 ? loss.total : add(g, total, loss.total);
    }
    return scale(g, total, 1.0 / static_cast<double>(videos.size()));
  };
  const GradCheckResult r = grad_check(build, params.tensors, options);
  return {"mdp_loss", r.max_rel_error, r.max_rel_error < tol};
}

}  // namespace

GradCheckReport run_gradcheck_suite(std::optional<std::pair<OpKind, double>> corrupt,
                                    double tolerance) {
  GradCheckReport report;
  report.tolerance = tolerance;
  GradCheckOptions options;
  options.corrupt = corrupt;
  Xoshiro256 rng(0x67AD);
  // Several cases exercise the same op (axes, reduce kinds); report the
  // worst one under a single entry per op.
  for (const Case& c : primitive_cases(rng)) {
    const GradCheckResult r = grad_check(c.build, c.params, options);
    const std::string name(op_name(c.op));
    auto it = std::find_if(report.entries.begin(), report.entries.end(),
                           [&](const GradCheckEntry& e) { return e.name == name; });
    if (it == report.entries.end()) {
      report.entries.push_back({name, r.max_rel_error, r.max_rel_error < tolerance});
    } else if (r.max_rel_error > it->max_rel_error || !(r.max_rel_error < tolerance)) {
      it->max_rel_error = std::max(it->max_rel_error, r.max_rel_error);
      it->passed = it->passed && r.max_rel_error < tolerance;
    }
  }
  report.entries.push_back(full_loss_case(rng, options, tolerance));
  return report;
}

}  // namespace mdp
