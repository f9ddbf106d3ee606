#pragma once

#include <cstddef>
#include <vector>

#include "mdp/graph.hpp"
#include "mdp/tensor.hpp"

namespace mdp::interact {

// Per-modality probabilistic encoder: LayerNorm(ReLU(tokens * w1)).
struct EncoderWeights {
  Tensor2D w1;       // raw_dim x d
  Tensor2D ln_gain;  // 1 x d
  Tensor2D ln_bias;  // 1 x d
};

// One directed attention set (query modality attends to key/value modality).
struct AttentionWeights {
  Tensor2D wq;  // d x d
  Tensor2D wk;
  Tensor2D wv;
};

struct EncoderNodes {
  NodeRef w1, ln_gain, ln_bias;
};

struct AttentionNodes {
  NodeRef wq, wk, wv;
};

struct AttentionResult {
  NodeRef enhanced;   // T x d, row t = relevance[t] * V[t]
  NodeRef relevance;  // T x 1, softmax of the relevance column sums
};

inline constexpr double kLayerNormEps = 1e-5;

NodeRef prob_encode(Graph& g, NodeRef tokens, const EncoderNodes& enc,
                    double eps = kLayerNormEps);

// Temporal-property-preserving cross-modal attention:
//   Q = query*Wq, K = kv*Wk, V = kv*Wv, R = Q K^T / sqrt(d),
//   r_t = sum_i R[i][t], r = softmax(r), out[t] = r_t * V[t].
AttentionResult cross_attend(Graph& g, NodeRef query, NodeRef key_value,
                             const AttentionNodes& att);

// X = [visual | att_visual | audio | att_audio], each T x d.
NodeRef fuse(Graph& g, NodeRef visual, NodeRef att_visual, NodeRef audio,
             NodeRef att_audio);

// Comprehensive video features X (T x 4d) and the duration they span.
struct ComprehensiveFeatures {
  Tensor2D x;
  std::size_t d = 0;
  double duration_s = 0.0;

  std::size_t steps() const { return x.rows(); }
};

// Value-level wrappers (build a throwaway graph of constants).
Tensor2D prob_encode(const Tensor2D& tokens, const EncoderWeights& enc,
                     double eps = kLayerNormEps);

struct Attention {
  Tensor2D enhanced;
  std::vector<double> relevance;
};
Attention cross_attend(const Tensor2D& query, const Tensor2D& key_value,
                       const AttentionWeights& att);

ComprehensiveFeatures fuse(const Tensor2D& visual, const Tensor2D& att_visual,
                           const Tensor2D& audio, const Tensor2D& att_audio,
                           double duration_s);

}  // namespace mdp::interact
