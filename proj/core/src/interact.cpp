#include "mdp/interact.hpp"

#include <array>
#include <cmath>

#include "mdp/error.hpp"

namespace mdp::interact {

NodeRef prob_encode(Graph& g, NodeRef tokens, const EncoderNodes& enc, double eps) {
  const NodeRef hidden = relu(g, matmul(g, tokens, enc.w1));
  return layer_norm_rows(g, hidden, enc.ln_gain, enc.ln_bias, eps);
}

AttentionResult cross_attend(Graph& g, NodeRef query, NodeRef key_value,
                             const AttentionNodes& att) {
  const Tensor2D& q_in = g.value(query);
  const Tensor2D& kv_in = g.value(key_value);
  if (!q_in.same_shape(kv_in)) {
    throw DimensionError("cross_attend: query " + q_in.shape_string() +
                         " and key/value " + kv_in.shape_string() + " differ");
  }
  const std::size_t d = q_in.cols();
  for (NodeRef w : {att.wq, att.wk, att.wv}) {
    const Tensor2D& wt = g.value(w);
    if (wt.rows() != d || wt.cols() != d) {
      throw DimensionError("cross_attend: projection must be " + std::to_string(d) +
                           "x" + std::to_string(d) + ", got " + wt.shape_string());
    }
  }
  const NodeRef q = matmul(g, query, att.wq);
  const NodeRef k = matmul(g, key_value, att.wk);
  const NodeRef v = matmul(g, key_value, att.wv);
  const NodeRef rel = scale(g, matmul(g, q, transpose(g, k)),
                            1.0 / std::sqrt(static_cast<double>(d)));
  const NodeRef col_sums = reduce(g, rel, Axis::kCol, ReduceKind::kSum);  // 1 x T
  const NodeRef weights = transpose(g, softmax(g, col_sums, Axis::kRow));  // T x 1
  return {scale_rows(g, v, weights), weights};
}

NodeRef fuse(Graph& g, NodeRef visual, NodeRef att_visual, NodeRef audio,
             NodeRef att_audio) {
  const Tensor2D& ref = g.value(visual);
  const std::array<NodeRef, 4> parts{visual, att_visual, audio, att_audio};
  for (NodeRef p : parts) {
    if (!g.value(p).same_shape(ref)) {
      throw DimensionError("fuse: blocks " + ref.shape_string() + " and " +
                           g.value(p).shape_string() + " differ");
    }
  }
  return concat_cols(g, parts);
}

Tensor2D prob_encode(const Tensor2D& tokens, const EncoderWeights& enc, double eps) {
  Graph g;
  const EncoderNodes nodes{g.constant(enc.w1), g.constant(enc.ln_gain),
                           g.constant(enc.ln_bias)};
  return g.value(prob_encode(g, g.constant(tokens), nodes, eps));
}

Attention cross_attend(const Tensor2D& query, const Tensor2D& key_value,
                       const AttentionWeights& att) {
  Graph g;
  const AttentionNodes nodes{g.constant(att.wq), g.constant(att.wk), g.constant(att.wv)};
  const auto r = cross_attend(g, g.constant(query), g.constant(key_value), nodes);
  const auto rel = g.value(r.relevance).data();
  return {g.value(r.enhanced), {rel.begin(), rel.end()}};
}

ComprehensiveFeatures fuse(const Tensor2D& visual, const Tensor2D& att_visual,
                           const Tensor2D& audio, const Tensor2D& att_audio,
                           double duration_s) {
  Graph g;
  const NodeRef x = fuse(g, g.constant(visual), g.constant(att_visual),
                         g.constant(audio), g.constant(att_audio));
  return {g.value(x), visual.cols(), duration_s};
}

}  // namespace mdp::interact
