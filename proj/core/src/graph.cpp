#include "mdp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdp/error.hpp"

namespace mdp {
namespace {

std::string shapes(const Tensor2D& a, const Tensor2D& b) {
  return a.shape_string() + " and " + b.shape_string();
}

void require_same_shape(std::string_view op, const Tensor2D& a,
                        const Tensor2D& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shapes(a, b));
  }
}

// Lines of a matrix along an axis: kRow walks each row, kCol each column.
struct LineLayout {
  std::size_t count;
  std::size_t length;
  std::size_t line_step;
  std::size_t elem_step;
};

LineLayout lines(const Tensor2D& t, Axis axis) {
  if (axis == Axis::kRow) return {t.rows(), t.cols(), t.cols(), 1};
  return {t.cols(), t.rows(), 1, t.cols()};
}

Graph::Node unary(OpKind kind, NodeRef a, Tensor2D value) {
  Graph::Node n;
  n.kind = kind;
  n.parents = {a.index};
  n.value = std::move(value);
  return n;
}

Graph::Node binary(OpKind kind, NodeRef a, NodeRef b, Tensor2D value) {
  Graph::Node n;
  n.kind = kind;
  n.parents = {a.index, b.index};
  n.value = std::move(value);
  return n;
}

}  // namespace

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kShift: return "shift";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kLog: return "log";
    case OpKind::kAbs: return "abs";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kClamp: return "clamp";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLayerNormRows: return "layer_norm_rows";
    case OpKind::kReduce: return "reduce";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kSliceRows: return "slice_rows";
    case OpKind::kScaleRows: return "scale_rows";
    case OpKind::kAddRowVector: return "add_row_vector";
    case OpKind::kSelect: return "select";
    case OpKind::kNormalizeL1Rows: return "normalize_l1_rows";
  }
  return "unknown";
}

NodeRef Graph::parameter(Tensor2D value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

NodeRef Graph::constant(Tensor2D value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = false;
  return push(std::move(n));
}

NodeRef Graph::push(Node node) {
  if (!node.value.all_finite()) {
    throw DomainError("non-finite value produced by " +
                      std::string(op_name(node.kind)));
  }
  for (auto p : node.parents) {
    if (p >= nodes_.size()) throw ContractError("parent node out of range");
    node.requires_grad = node.requires_grad || nodes_[p].requires_grad;
  }
  nodes_.push_back(std::move(node));
  return NodeRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor2D& Graph::value(NodeRef node) const {
  return nodes_.at(node.index).value;
}

Tensor2D Graph::grad(NodeRef node) const {
  const Node& n = nodes_.at(node.index);
  if (n.grad.same_shape(n.value)) return n.grad;
  return Tensor2D(n.value.rows(), n.value.cols());
}

OpKind Graph::kind(NodeRef node) const { return nodes_.at(node.index).kind; }

Tensor2D& Graph::grad_of(std::uint32_t index) { return nodes_[index].grad; }

void Graph::backward(NodeRef loss) {
  const Node& l = nodes_.at(loss.index);
  if (l.value.rows() != 1 || l.value.cols() != 1) {
    throw ContractError("backward requires a 1x1 loss, got " +
                        l.value.shape_string());
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad && i <= loss.index) {
      n.grad = Tensor2D(n.value.rows(), n.value.cols());
    } else {
      n.grad = Tensor2D();
    }
  }
  if (!l.requires_grad) return;
  nodes_[loss.index].grad(0, 0) = 1.0;
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    if (nodes_[i].requires_grad && nodes_[i].kind != OpKind::kLeaf) {
      backward_node(i);
    }
  }
}

void Graph::backward_node(std::size_t index) {
  const Node& n = nodes_[index];
  const Tensor2D& go = n.grad;
  const Tensor2D& y = n.value;
  const double f = (fault_ && fault_->kind == n.kind) ? fault_->factor : 1.0;

  auto needs = [&](std::size_t k) { return nodes_[n.parents[k]].requires_grad; };
  auto parent = [&](std::size_t k) -> const Tensor2D& {
    return nodes_[n.parents[k]].value;
  };
  auto pgrad = [&](std::size_t k) -> Tensor2D& { return grad_of(n.parents[k]); };

  // Elementwise unary helper: dx += f * dy * local(x, y).
  auto unary_grad = [&](auto local) {
    if (!needs(0)) return;
    const auto x = parent(0).data();
    auto dx = pgrad(0).data();
    const auto dy = go.data();
    const auto yv = y.data();
    for (std::size_t i = 0; i < dx.size(); ++i) {
      dx[i] += f * dy[i] * local(x[i], yv[i]);
    }
  };

  switch (n.kind) {
    case OpKind::kLeaf:
      break;
    case OpKind::kMatMul: {
      const Tensor2D& a = parent(0);
      const Tensor2D& b = parent(1);
      const std::size_t rows = a.rows(), inner = a.cols(), cols = b.cols();
      if (needs(0)) {
        Tensor2D& da = pgrad(0);
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t k = 0; k < inner; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += go(i, j) * b(k, j);
            da(i, k) += f * s;
          }
        }
      }
      if (needs(1)) {
        Tensor2D& db = pgrad(1);
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t k = 0; k < inner; ++k) {
            const double aik = f * a(i, k);
            if (aik == 0.0) continue;
            auto dbrow = db.row(k);
            auto grow = go.row(i);
            for (std::size_t j = 0; j < cols; ++j) dbrow[j] += aik * grow[j];
          }
        }
      }
      break;
    }
    case OpKind::kTranspose: {
      if (!needs(0)) break;
      Tensor2D& da = pgrad(0);
      for (std::size_t i = 0; i < go.rows(); ++i)
        for (std::size_t j = 0; j < go.cols(); ++j) da(j, i) += f * go(i, j);
      break;
    }
    case OpKind::kAdd:
    case OpKind::kSub: {
      const double sign = n.kind == OpKind::kAdd ? 1.0 : -1.0;
      const auto dy = go.data();
      if (needs(0)) {
        auto da = pgrad(0).data();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += f * dy[i];
      }
      if (needs(1)) {
        auto db = pgrad(1).data();
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += sign * f * dy[i];
      }
      break;
    }
    case OpKind::kMul: {
      const auto dy = go.data();
      const auto av = parent(0).data();
      const auto bv = parent(1).data();
      if (needs(0)) {
        auto da = pgrad(0).data();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += f * dy[i] * bv[i];
      }
      if (needs(1)) {
        auto db = pgrad(1).data();
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += f * dy[i] * av[i];
      }
      break;
    }
    case OpKind::kScale: {
      const double c = n.a;
      unary_grad([c](double, double) { return c; });
      break;
    }
    case OpKind::kShift:
      unary_grad([](double, double) { return 1.0; });
      break;
    case OpKind::kRelu:
      unary_grad([](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
      break;
    case OpKind::kSigmoid:
      unary_grad([](double, double s) { return s * (1.0 - s); });
      break;
    case OpKind::kLog:
      unary_grad([](double x, double) { return 1.0 / x; });
      break;
    case OpKind::kAbs:
      unary_grad([](double x, double) {
        return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      });
      break;
    case OpKind::kSqrt:
      unary_grad([](double, double s) { return s > 0.0 ? 0.5 / s : 0.0; });
      break;
    case OpKind::kClamp: {
      const double lo = n.a, hi = n.b;
      unary_grad([lo, hi](double x, double) {
        return (x >= lo && x <= hi) ? 1.0 : 0.0;
      });
      break;
    }
    case OpKind::kSoftmax: {
      if (!needs(0)) break;
      const LineLayout L = lines(y, n.axis);
      auto dx = pgrad(0).data();
      const auto yv = y.data();
      const auto dy = go.data();
      for (std::size_t line = 0; line < L.count; ++line) {
        const std::size_t base = line * L.line_step;
        double dot = 0.0;
        for (std::size_t e = 0; e < L.length; ++e) {
          const std::size_t k = base + e * L.elem_step;
          dot += dy[k] * yv[k];
        }
        for (std::size_t e = 0; e < L.length; ++e) {
          const std::size_t k = base + e * L.elem_step;
          dx[k] += f * yv[k] * (dy[k] - dot);
        }
      }
      break;
    }
    case OpKind::kLayerNormRows: {
      const Tensor2D& x = parent(0);
      const Tensor2D& gain = parent(1);
      const std::size_t rows = x.rows(), cols = x.cols();
      const double eps = n.a;
      std::vector<double> xhat(cols), dxhat(cols);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto xr = x.row(r);
        double mean = 0.0;
        for (double v : xr) mean += v;
        mean /= static_cast<double>(cols);
        double var = 0.0;
        for (double v : xr) var += (v - mean) * (v - mean);
        var /= static_cast<double>(cols);
        const double inv_std = 1.0 / std::sqrt(var + eps);
        for (std::size_t c = 0; c < cols; ++c) {
          xhat[c] = (xr[c] - mean) * inv_std;
          dxhat[c] = go(r, c) * gain(0, c);
        }
        if (needs(1)) {
          Tensor2D& dg = pgrad(1);
          for (std::size_t c = 0; c < cols; ++c) dg(0, c) += f * go(r, c) * xhat[c];
        }
        if (needs(2)) {
          Tensor2D& db = pgrad(2);
          for (std::size_t c = 0; c < cols; ++c) db(0, c) += f * go(r, c);
        }
        if (needs(0)) {
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t c = 0; c < cols; ++c) {
            mean_d += dxhat[c];
            mean_dx += dxhat[c] * xhat[c];
          }
          mean_d /= static_cast<double>(cols);
          mean_dx /= static_cast<double>(cols);
          auto dx = pgrad(0).row(r);
          for (std::size_t c = 0; c < cols; ++c) {
            dx[c] += f * inv_std * (dxhat[c] - mean_d - xhat[c] * mean_dx);
          }
        }
      }
      break;
    }
    case OpKind::kReduce: {
      if (!needs(0)) break;
      const Tensor2D& x = parent(0);
      Tensor2D& dx = pgrad(0);
      const std::size_t rows = x.rows(), cols = x.cols();
      double norm = 1.0;
      if (n.reduce == ReduceKind::kMean) {
        norm = n.axis == Axis::kRow   ? static_cast<double>(cols)
               : n.axis == Axis::kCol ? static_cast<double>(rows)
                                      : static_cast<double>(rows * cols);
      }
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double g = n.axis == Axis::kRow   ? go(r, 0)
                           : n.axis == Axis::kCol ? go(0, c)
                                                  : go(0, 0);
          dx(r, c) += f * g / norm;
        }
      }
      break;
    }
    case OpKind::kConcatCols: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.parents.size(); ++k) {
        const std::size_t w = parent(k).cols();
        if (needs(k)) {
          Tensor2D& dp = pgrad(k);
          for (std::size_t r = 0; r < go.rows(); ++r)
            for (std::size_t c = 0; c < w; ++c) dp(r, c) += f * go(r, offset + c);
        }
        offset += w;
      }
      break;
    }
    case OpKind::kSliceRows: {
      if (!needs(0)) break;
      Tensor2D& dx = pgrad(0);
      for (std::size_t r = 0; r < go.rows(); ++r)
        for (std::size_t c = 0; c < go.cols(); ++c) dx(n.i0 + r, c) += f * go(r, c);
      break;
    }
    case OpKind::kScaleRows: {
      const Tensor2D& a = parent(0);
      const Tensor2D& s = parent(1);
      if (needs(0)) {
        Tensor2D& da = pgrad(0);
        for (std::size_t r = 0; r < a.rows(); ++r)
          for (std::size_t c = 0; c < a.cols(); ++c) da(r, c) += f * go(r, c) * s(r, 0);
      }
      if (needs(1)) {
        Tensor2D& ds = pgrad(1);
        for (std::size_t r = 0; r < a.rows(); ++r) {
          double acc = 0.0;
          for (std::size_t c = 0; c < a.cols(); ++c) acc += go(r, c) * a(r, c);
          ds(r, 0) += f * acc;
        }
      }
      break;
    }
    case OpKind::kAddRowVector: {
      if (needs(0)) {
        auto da = pgrad(0).data();
        const auto dy = go.data();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += f * dy[i];
      }
      if (needs(1)) {
        Tensor2D& db = pgrad(1);
        for (std::size_t r = 0; r < go.rows(); ++r)
          for (std::size_t c = 0; c < go.cols(); ++c) db(0, c) += f * go(r, c);
      }
      break;
    }
    case OpKind::kSelect: {
      if (needs(0)) pgrad(0)(n.i0, n.i1) += f * go(0, 0);
      break;
    }
    case OpKind::kNormalizeL1Rows: {
      if (!needs(0)) break;
      const Tensor2D& x = parent(0);
      Tensor2D& dx = pgrad(0);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        double s = 0.0, dot = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
          s += x(r, c);
          dot += go(r, c) * y(r, c);
        }
        for (std::size_t c = 0; c < x.cols(); ++c) dx(r, c) += f * (go(r, c) - dot) / s;
      }
      break;
    }
  }
}

NodeRef matmul(Graph& g, NodeRef a, NodeRef b) {
  const Tensor2D& x = g.value(a);
  const Tensor2D& w = g.value(b);
  if (x.cols() != w.rows() || x.cols() == 0) {
    throw DimensionError("matmul: incompatible shapes " + shapes(x, w));
  }
  Tensor2D out(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      const auto wrow = w.row(k);
      for (std::size_t j = 0; j < w.cols(); ++j) orow[j] += xik * wrow[j];
    }
  }
  return g.push(binary(OpKind::kMatMul, a, b, std::move(out)));
}

NodeRef transpose(Graph& g, NodeRef a) {
  const Tensor2D& x = g.value(a);
  Tensor2D out(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  return g.push(unary(OpKind::kTranspose, a, std::move(out)));
}

namespace {

template <typename Fn>
NodeRef elementwise_binary(Graph& g, OpKind kind, NodeRef a, NodeRef b, Fn fn) {
  const Tensor2D& x = g.value(a);
  const Tensor2D& y = g.value(b);
  require_same_shape(op_name(kind), x, y);
  Tensor2D out(x.rows(), x.cols());
  auto o = out.data();
  const auto xv = x.data();
  const auto yv = y.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = fn(xv[i], yv[i]);
  return g.push(binary(kind, a, b, std::move(out)));
}

template <typename Fn>
Graph::Node elementwise_unary(const Graph& g, OpKind kind, NodeRef a, Fn fn) {
  const Tensor2D& x = g.value(a);
  Tensor2D out(x.rows(), x.cols());
  auto o = out.data();
  const auto xv = x.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = fn(xv[i]);
  return unary(kind, a, std::move(out));
}

}  // namespace

NodeRef add(Graph& g, NodeRef a, NodeRef b) {
  return elementwise_binary(g, OpKind::kAdd, a, b,
                            [](double x, double y) { return x + y; });
}

NodeRef sub(Graph& g, NodeRef a, NodeRef b) {
  return elementwise_binary(g, OpKind::kSub, a, b,
                            [](double x, double y) { return x - y; });
}

NodeRef mul(Graph& g, NodeRef a, NodeRef b) {
  return elementwise_binary(g, OpKind::kMul, a, b,
                            [](double x, double y) { return x * y; });
}

NodeRef scale(Graph& g, NodeRef a, double c) {
  auto n = elementwise_unary(g, OpKind::kScale, a, [c](double x) { return c * x; });
  n.a = c;
  return g.push(std::move(n));
}

NodeRef shift(Graph& g, NodeRef a, double c) {
  auto n = elementwise_unary(g, OpKind::kShift, a, [c](double x) { return x + c; });
  n.a = c;
  return g.push(std::move(n));
}

NodeRef relu(Graph& g, NodeRef a) {
  return g.push(elementwise_unary(g, OpKind::kRelu, a,
                                  [](double x) { return x > 0.0 ? x : 0.0; }));
}

NodeRef sigmoid(Graph& g, NodeRef a) {
  return g.push(elementwise_unary(g, OpKind::kSigmoid, a, [](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  }));
}

NodeRef log(Graph& g, NodeRef a) {
  for (double v : g.value(a).data()) {
    if (!(v > 0.0)) {
      throw DomainError("log of non-positive value " + std::to_string(v));
    }
  }
  return g.push(elementwise_unary(g, OpKind::kLog, a,
                                  [](double x) { return std::log(x); }));
}

NodeRef abs(Graph& g, NodeRef a) {
  return g.push(elementwise_unary(g, OpKind::kAbs, a,
                                  [](double x) { return std::fabs(x); }));
}

NodeRef sqrt(Graph& g, NodeRef a) {
  for (double v : g.value(a).data()) {
    if (v < 0.0) throw DomainError("sqrt of negative value " + std::to_string(v));
  }
  return g.push(elementwise_unary(g, OpKind::kSqrt, a,
                                  [](double x) { return std::sqrt(x); }));
}

NodeRef clamp(Graph& g, NodeRef a, double lo, double hi) {
  if (lo > hi) throw ContractError("clamp: lo > hi");
  auto n = elementwise_unary(g, OpKind::kClamp, a,
                             [lo, hi](double x) { return std::clamp(x, lo, hi); });
  n.a = lo;
  n.b = hi;
  return g.push(std::move(n));
}

NodeRef softmax(Graph& g, NodeRef a, Axis axis) {
  if (axis == Axis::kAll) throw ContractError("softmax: axis must be row or col");
  const Tensor2D& x = g.value(a);
  Tensor2D out(x.rows(), x.cols());
  const LineLayout L = lines(x, axis);
  const auto xv = x.data();
  auto o = out.data();
  for (std::size_t line = 0; line < L.count; ++line) {
    const std::size_t base = line * L.line_step;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < L.length; ++e)
      mx = std::max(mx, xv[base + e * L.elem_step]);
    double total = 0.0;
    for (std::size_t e = 0; e < L.length; ++e) {
      const std::size_t k = base + e * L.elem_step;
      o[k] = std::exp(xv[k] - mx);
      total += o[k];
    }
    for (std::size_t e = 0; e < L.length; ++e) o[base + e * L.elem_step] /= total;
  }
  auto n = unary(OpKind::kSoftmax, a, std::move(out));
  n.axis = axis;
  return g.push(std::move(n));
}

NodeRef layer_norm_rows(Graph& g, NodeRef a, NodeRef gain, NodeRef bias,
                        double eps) {
  const Tensor2D& x = g.value(a);
  const Tensor2D& gv = g.value(gain);
  const Tensor2D& bv = g.value(bias);
  if (x.cols() == 0) throw DimensionError("layer_norm_rows: zero columns");
  if (gv.rows() != 1 || gv.cols() != x.cols() || !gv.same_shape(bv)) {
    throw DimensionError("layer_norm_rows: gain/bias must be 1x" +
                         std::to_string(x.cols()) + ", got " + shapes(gv, bv));
  }
  if (!(eps >= 0.0)) throw ContractError("layer_norm_rows: eps must be >= 0");
  const std::size_t cols = x.cols();
  Tensor2D out(x.rows(), cols);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    double mean = 0.0;
    for (double v : xr) mean += v;
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (double v : xr) var += (v - mean) * (v - mean);
    var /= static_cast<double>(cols);
    const double denom = std::sqrt(var + eps);
    for (std::size_t c = 0; c < cols; ++c) {
      // A zero-variance row with eps == 0 maps to the bias.
      const double xhat = denom > 0.0 ? (xr[c] - mean) / denom : 0.0;
      out(r, c) = xhat * gv(0, c) + bv(0, c);
    }
  }
  Graph::Node n;
  n.kind = OpKind::kLayerNormRows;
  n.parents = {a.index, gain.index, bias.index};
  n.value = std::move(out);
  n.a = eps;
  return g.push(std::move(n));
}

NodeRef reduce(Graph& g, NodeRef a, Axis axis, ReduceKind kind) {
  const Tensor2D& x = g.value(a);
  if (x.size() == 0) throw DimensionError("reduce: empty input " + x.shape_string());
  Tensor2D out = axis == Axis::kRow   ? Tensor2D(x.rows(), 1)
                 : axis == Axis::kCol ? Tensor2D(1, x.cols())
                                      : Tensor2D(1, 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double v = x(r, c);
      if (axis == Axis::kRow) out(r, 0) += v;
      else if (axis == Axis::kCol) out(0, c) += v;
      else out(0, 0) += v;
    }
  }
  if (kind == ReduceKind::kMean) {
    const double norm = axis == Axis::kRow   ? static_cast<double>(x.cols())
                        : axis == Axis::kCol ? static_cast<double>(x.rows())
                                             : static_cast<double>(x.size());
    for (double& v : out.data()) v /= norm;
  }
  auto n = unary(OpKind::kReduce, a, std::move(out));
  n.axis = axis;
  n.reduce = kind;
  return g.push(std::move(n));
}

NodeRef concat_cols(Graph& g, std::span<const NodeRef> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t rows = g.value(parts[0]).rows();
  std::size_t cols = 0;
  for (auto p : parts) {
    const Tensor2D& t = g.value(p);
    if (t.rows() != rows) {
      throw DimensionError("concat_cols: row mismatch " +
                           shapes(g.value(parts[0]), t));
    }
    cols += t.cols();
  }
  Tensor2D out(rows, cols);
  std::size_t offset = 0;
  Graph::Node n;
  n.kind = OpKind::kConcatCols;
  for (auto p : parts) {
    const Tensor2D& t = g.value(p);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < t.cols(); ++c) out(r, offset + c) = t(r, c);
    offset += t.cols();
    n.parents.push_back(p.index);
  }
  n.value = std::move(out);
  return g.push(std::move(n));
}

NodeRef slice_rows(Graph& g, NodeRef a, std::size_t begin, std::size_t end) {
  const Tensor2D& x = g.value(a);
  if (begin > end || end > x.rows()) {
    throw DimensionError("slice_rows: range [" + std::to_string(begin) + "," +
                         std::to_string(end) + ") outside " + x.shape_string());
  }
  Tensor2D out(end - begin, x.cols());
  for (std::size_t r = begin; r < end; ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r - begin, c) = x(r, c);
  auto n = unary(OpKind::kSliceRows, a, std::move(out));
  n.i0 = begin;
  n.i1 = end;
  return g.push(std::move(n));
}

NodeRef scale_rows(Graph& g, NodeRef a, NodeRef s) {
  const Tensor2D& x = g.value(a);
  const Tensor2D& sv = g.value(s);
  if (sv.rows() != x.rows() || sv.cols() != 1) {
    throw DimensionError("scale_rows: scale must be " +
                         std::to_string(x.rows()) + "x1, got " + shapes(x, sv));
  }
  Tensor2D out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = sv(r, 0) * x(r, c);
  return g.push(binary(OpKind::kScaleRows, a, s, std::move(out)));
}

NodeRef add_row_vector(Graph& g, NodeRef a, NodeRef b) {
  const Tensor2D& x = g.value(a);
  const Tensor2D& bv = g.value(b);
  if (bv.rows() != 1 || bv.cols() != x.cols()) {
    throw DimensionError("add_row_vector: bias must be 1x" +
                         std::to_string(x.cols()) + ", got " + shapes(x, bv));
  }
  Tensor2D out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) + bv(0, c);
  return g.push(binary(OpKind::kAddRowVector, a, b, std::move(out)));
}

NodeRef select(Graph& g, NodeRef a, std::size_t r, std::size_t c) {
  const Tensor2D& x = g.value(a);
  if (r >= x.rows() || c >= x.cols()) {
    throw DimensionError("select: index outside " + x.shape_string());
  }
  auto n = unary(OpKind::kSelect, a, Tensor2D(1, 1, x(r, c)));
  n.i0 = r;
  n.i1 = c;
  return g.push(std::move(n));
}

NodeRef normalize_l1_rows(Graph& g, NodeRef a) {
  const Tensor2D& x = g.value(a);
  Tensor2D out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (double v : x.row(r)) s += v;
    if (!(s > 0.0)) throw DomainError("normalize_l1_rows: non-positive row sum");
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) / s;
  }
  return g.push(unary(OpKind::kNormalizeL1Rows, a, std::move(out)));
}

}  // namespace mdp
