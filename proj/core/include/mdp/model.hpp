#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "mdp/corpus.hpp"
#include "mdp/graph.hpp"
#include "mdp/interact.hpp"
#include "mdp/localize.hpp"
#include "mdp/objective.hpp"
#include "mdp/rng.hpp"

namespace mdp::model {

struct ModelDims {
  std::size_t raw_dim_v = 48;
  std::size_t raw_dim_a = 24;
  std::size_t d = 32;
  std::size_t steps = 64;  // aligned length T
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Fixed parameter order; checkpoints and optimizer state follow it.
enum class ParamId : std::size_t {
  kVisualW1,
  kVisualLnGain,
  kVisualLnBias,
  kAudioW1,
  kAudioLnGain,
  kAudioLnBias,
  kAttVisualWq,
  kAttVisualWk,
  kAttVisualWv,
  kAttAudioWq,
  kAttAudioWk,
  kAttAudioWv,
  kHeadW,
  kHeadB,
};
inline constexpr std::size_t kParamCount = 14;

std::string_view param_name(ParamId id);

struct ModelParams {
  ModelDims dims;
  std::vector<Tensor2D> tensors;  // indexed by ParamId

  Tensor2D& operator[](ParamId id) { return tensors.at(static_cast<std::size_t>(id)); }
  const Tensor2D& operator[](ParamId id) const {
    return tensors.at(static_cast<std::size_t>(id));
  }
  interact::EncoderWeights encoder(corpus::Modality m) const;
  interact::AttentionWeights attention(corpus::Modality query) const;
  localize::HeadWeights head() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Glorot-uniform weights, zero biases and LayerNorm shifts, unit LayerNorm
// gains. Draw order follows ParamId.
ModelParams init_params(const ModelDims& dims, Xoshiro256& rng);

// Expected shape of every parameter for the given dims.
std::pair<std::size_t, std::size_t> param_shape(const ModelDims& dims, ParamId id);

struct ParamNodes {
  std::array<NodeRef, kParamCount> refs{};
  NodeRef operator[](ParamId id) const { return refs[static_cast<std::size_t>(id)]; }
  interact::EncoderNodes encoder(corpus::Modality m) const;
  interact::AttentionNodes attention(corpus::Modality query) const;
  localize::HeadNodes head() const;
};

ParamNodes bind(Graph& g, const ModelParams& params);
std::vector<Tensor2D> gradients(const Graph& g, const ParamNodes& nodes);

// Aligned per-video inputs (T x raw_dim for each modality).
struct VideoInputs {
  Tensor2D visual;
  Tensor2D audio;
  double duration_s = 0.0;
};

// tokenize + temporal_pool on both modalities.
VideoInputs prepare_inputs(const corpus::FeatureMatrix& visual,
                           const corpus::FeatureMatrix& audio, double duration_s,
                           std::size_t steps);

struct ModelOptions {
  bool use_cma = true;
  objective::DeviationKind dp_kind = objective::DeviationKind::kMse;
  objective::DeviationReduce dp_reduce = objective::DeviationReduce::kMean;
};

struct ForwardNodes {
  NodeRef visual;       // encoded visual, T x d
  NodeRef audio;        // encoded audio, T x d
  NodeRef features;     // X, T x 4d
  NodeRef probs;        // FAS, T x 2
  NodeRef video_score;  // 1 x 2
  NodeRef deviation;    // 1 x 1
};

// Without cross-modal attention the attention blocks of X are zero.
ForwardNodes forward(Graph& g, const ParamNodes& params, const VideoInputs& inputs,
                     const ModelOptions& options);

struct SampleLoss {
  NodeRef cls;
  NodeRef dp;
  NodeRef total;  // cls + phi * dp (phi = 0 when the dp term is disabled)
};

SampleLoss sample_loss(Graph& g, const ForwardNodes& fwd, int label, double phi,
                       bool use_dp);

}  // namespace mdp::model
