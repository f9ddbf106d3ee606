#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdp/tensor.hpp"

namespace mdp {

// Handle to a node of a Graph. Only meaningful for the graph that made it.
struct NodeRef {
  std::uint32_t index = 0;
  friend bool operator==(NodeRef, NodeRef) = default;
};

// kRow: the operation acts within each row (softmax normalizes each row,
// reduce produces one value per row, shape rows x 1).
// kCol: the operation acts within each column (shape 1 x cols for reduce).
// kAll: whole-matrix reduction to 1 x 1.
enum class Axis { kRow, kCol, kAll };

enum class ReduceKind { kSum, kMean };

enum class OpKind {
  kLeaf,
  kMatMul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kScale,
  kShift,
  kRelu,
  kSigmoid,
  kLog,
  kAbs,
  kSqrt,
  kClamp,
  kSoftmax,
  kLayerNormRows,
  kReduce,
  kConcatCols,
  kSliceRows,
  kScaleRows,
  kAddRowVector,
  kSelect,
  kNormalizeL1Rows,
};

std::string_view op_name(OpKind kind);

// Append-only reverse-mode tape. Nodes are created by the free functions
// below; parents always precede children, so a reverse sweep over the node
// list is a valid topological order.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  // Leaf whose gradient is tracked.
  NodeRef parameter(Tensor2D value);
  // Leaf treated as data; no gradient flows into it.
  NodeRef constant(Tensor2D value);

  const Tensor2D& value(NodeRef node) const;
  // Gradient of the last backward() loss w.r.t. node. Zero for nodes that
  // do not feed the loss and for constants.
  Tensor2D grad(NodeRef node) const;
  OpKind kind(NodeRef node) const;
  std::size_t size() const { return nodes_.size(); }

  // Reverse sweep from a 1x1 loss node. Resets all previous gradients.
  void backward(NodeRef loss);

  // Test hook: multiplies the gradient that `kind` passes to its parents by
  // `factor`. Used by mutation tests to prove the gradient checker bites.
  void corrupt_gradient(OpKind kind, double factor) {
    fault_ = Fault{kind, factor};
  }

  struct Node {
    OpKind kind = OpKind::kLeaf;
    std::vector<std::uint32_t> parents;
    Tensor2D value;
    Tensor2D grad;
    bool requires_grad = false;
    Axis axis = Axis::kAll;
    ReduceKind reduce = ReduceKind::kSum;
    double a = 0.0;
    double b = 0.0;
    std::size_t i0 = 0;
    std::size_t i1 = 0;
  };

  // Used by the op implementations.
  NodeRef push(Node node);
  const Node& node(NodeRef ref) const { return nodes_.at(ref.index); }

 private:
  struct Fault {
    OpKind kind;
    double factor;
  };

  void backward_node(std::size_t index);
  Tensor2D& grad_of(std::uint32_t index);

  std::vector<Node> nodes_;
  std::optional<Fault> fault_;
};

// a (n x k) * b (k x m).
NodeRef matmul(Graph& g, NodeRef a, NodeRef b);
NodeRef transpose(Graph& g, NodeRef a);

NodeRef add(Graph& g, NodeRef a, NodeRef b);
NodeRef sub(Graph& g, NodeRef a, NodeRef b);
NodeRef mul(Graph& g, NodeRef a, NodeRef b);
NodeRef scale(Graph& g, NodeRef a, double c);
// a + c elementwise.
NodeRef shift(Graph& g, NodeRef a, double c);
NodeRef relu(Graph& g, NodeRef a);
NodeRef sigmoid(Graph& g, NodeRef a);
// Throws DomainError on any non-positive entry.
NodeRef log(Graph& g, NodeRef a);
// Subgradient 0 at 0.
NodeRef abs(Graph& g, NodeRef a);
// Throws DomainError on negative entries; subgradient 0 at 0.
NodeRef sqrt(Graph& g, NodeRef a);
// Gradient passes where lo <= a <= hi, zero outside.
NodeRef clamp(Graph& g, NodeRef a, double lo, double hi);

// Max-subtracted softmax; axis must be kRow or kCol.
NodeRef softmax(Graph& g, NodeRef a, Axis axis);

// Row-wise LayerNorm with per-column affine; gain and bias are 1 x cols.
NodeRef layer_norm_rows(Graph& g, NodeRef a, NodeRef gain, NodeRef bias,
                        double eps = 1e-5);

NodeRef reduce(Graph& g, NodeRef a, Axis axis, ReduceKind kind);

NodeRef concat_cols(Graph& g, std::span<const NodeRef> parts);
// Rows [begin, end).
NodeRef slice_rows(Graph& g, NodeRef a, std::size_t begin, std::size_t end);
// out[i][j] = s[i] * a[i][j]; s is rows x 1.
NodeRef scale_rows(Graph& g, NodeRef a, NodeRef s);
// out[i][j] = a[i][j] + b[j]; b is 1 x cols.
NodeRef add_row_vector(Graph& g, NodeRef a, NodeRef b);
// 1 x 1 view of a(r, c).
NodeRef select(Graph& g, NodeRef a, std::size_t r, std::size_t c);
// Each row divided by its sum; throws DomainError for a non-positive sum.
NodeRef normalize_l1_rows(Graph& g, NodeRef a);

}  // namespace mdp
