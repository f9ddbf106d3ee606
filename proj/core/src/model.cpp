#include "mdp/model.hpp"

#include <cmath>

#include "mdp/align.hpp"
#include "mdp/error.hpp"

namespace mdp::model {

namespace {
constexpr std::array<std::string_view, kParamCount> kNames = {
    "encoder.visual.w1",     "encoder.visual.ln_gain", "encoder.visual.ln_bias",
    "encoder.audio.w1",      "encoder.audio.ln_gain",  "encoder.audio.ln_bias",
    "attention.visual.wq",   "attention.visual.wk",    "attention.visual.wv",
    "attention.audio.wq",    "attention.audio.wk",     "attention.audio.wv",
    "head.w",                "head.b",
};

ParamId id(std::size_t i) { return static_cast<ParamId>(i); }
}  // namespace

std::string_view param_name(ParamId p) { return kNames.at(static_cast<std::size_t>(p)); }

std::pair<std::size_t, std::size_t> param_shape(const ModelDims& dims, ParamId p) {
  const std::size_t d = dims.d;
  switch (p) {
    case ParamId::kVisualW1: return {dims.raw_dim_v, d};
    case ParamId::kAudioW1: return {dims.raw_dim_a, d};
    case ParamId::kVisualLnGain:
    case ParamId::kVisualLnBias:
    case ParamId::kAudioLnGain:
    case ParamId::kAudioLnBias: return {1, d};
    case ParamId::kHeadW: return {4 * d, 2};
    case ParamId::kHeadB: return {1, 2};
    default: return {d, d};
  }
}

ModelParams init_params(const ModelDims& dims, Xoshiro256& rng) {
  if (dims.d == 0 || dims.raw_dim_v == 0 || dims.raw_dim_a == 0 || dims.steps == 0) {
    throw ConfigError("model: T, d and raw dims must all be > 0");
  }
  ModelParams params;
  params.dims = dims;
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const auto [rows, cols] = param_shape(dims, id(i));
    Tensor2D t(rows, cols);
    switch (id(i)) {
      case ParamId::kVisualLnGain:
      case ParamId::kAudioLnGain:
        t.fill(1.0);
        break;
      case ParamId::kVisualLnBias:
      case ParamId::kAudioLnBias:
      case ParamId::kHeadB:
        break;
      default: {
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (double& v : t.data()) v = rng.uniform(-limit, limit);
      }
    }
    params.tensors.push_back(std::move(t));
  }
  return params;
}

interact::EncoderWeights ModelParams::encoder(corpus::Modality m) const {
  if (m == corpus::Modality::kVisual) {
    return {(*this)[ParamId::kVisualW1], (*this)[ParamId::kVisualLnGain],
            (*this)[ParamId::kVisualLnBias]};
  }
  return {(*this)[ParamId::kAudioW1], (*this)[ParamId::kAudioLnGain],
          (*this)[ParamId::kAudioLnBias]};
}

interact::AttentionWeights ModelParams::attention(corpus::Modality query) const {
  if (query == corpus::Modality::kVisual) {
    return {(*this)[ParamId::kAttVisualWq], (*this)[ParamId::kAttVisualWk],
            (*this)[ParamId::kAttVisualWv]};
  }
  return {(*this)[ParamId::kAttAudioWq], (*this)[ParamId::kAttAudioWk],
          (*this)[ParamId::kAttAudioWv]};
}

localize::HeadWeights ModelParams::head() const {
  return {(*this)[ParamId::kHeadW], (*this)[ParamId::kHeadB]};
}

interact::EncoderNodes ParamNodes::encoder(corpus::Modality m) const {
  if (m == corpus::Modality::kVisual) {
    return {(*this)[ParamId::kVisualW1], (*this)[ParamId::kVisualLnGain],
            (*this)[ParamId::kVisualLnBias]};
  }
  return {(*this)[ParamId::kAudioW1], (*this)[ParamId::kAudioLnGain],
          (*this)[ParamId::kAudioLnBias]};
}

interact::AttentionNodes ParamNodes::attention(corpus::Modality query) const {
  if (query == corpus::Modality::kVisual) {
    return {(*this)[ParamId::kAttVisualWq], (*this)[ParamId::kAttVisualWk],
            (*this)[ParamId::kAttVisualWv]};
  }
  return {(*this)[ParamId::kAttAudioWq], (*this)[ParamId::kAttAudioWk],
          (*this)[ParamId::kAttAudioWv]};
}

localize::HeadNodes ParamNodes::head() const {
  return {(*this)[ParamId::kHeadW], (*this)[ParamId::kHeadB]};
}

ParamNodes bind(Graph& g, const ModelParams& params) {
  if (params.tensors.size() != kParamCount) {
    throw ContractError("bind: expected " + std::to_string(kParamCount) + " parameter tensors");
  }
  ParamNodes nodes;
  for (std::size_t i = 0; i < kParamCount; ++i) nodes.refs[i] = g.parameter(params.tensors[i]);
  return nodes;
}

std::vector<Tensor2D> gradients(const Graph& g, const ParamNodes& nodes) {
  std::vector<Tensor2D> out;
  out.reserve(kParamCount);
  for (NodeRef r : nodes.refs) out.push_back(g.grad(r));
  return out;
}

VideoInputs prepare_inputs(const corpus::FeatureMatrix& visual,
                           const corpus::FeatureMatrix& audio, double duration_s,
                           std::size_t steps) {
  return {align::temporal_pool(align::tokenize(visual), steps).tokens,
          align::temporal_pool(align::tokenize(audio), steps).tokens, duration_s};
}

ForwardNodes forward(Graph& g, const ParamNodes& params, const VideoInputs& inputs,
                     const ModelOptions& options) {
  using corpus::Modality;
  if (inputs.visual.rows() != inputs.audio.rows()) {
    throw DimensionError("forward: visual has " + std::to_string(inputs.visual.rows()) +
                         " steps but audio has " + std::to_string(inputs.audio.rows()));
  }
  ForwardNodes out;
  out.visual = interact::prob_encode(g, g.constant(inputs.visual), params.encoder(Modality::kVisual));
  out.audio = interact::prob_encode(g, g.constant(inputs.audio), params.encoder(Modality::kAudio));

  NodeRef att_v, att_a;
  if (options.use_cma) {
    att_v = interact::cross_attend(g, out.visual, out.audio, params.attention(Modality::kVisual)).enhanced;
    att_a = interact::cross_attend(g, out.audio, out.visual, params.attention(Modality::kAudio)).enhanced;
  } else {
    const Tensor2D& shape = g.value(out.visual);
    att_v = att_a = g.constant(Tensor2D(shape.rows(), shape.cols()));
  }
  out.features = interact::fuse(g, out.visual, att_v, out.audio, att_a);
  out.probs = localize::fas_head(g, out.features, params.head());
  out.video_score = localize::video_score(g, out.probs);
  out.deviation = objective::temporal_deviation(g, out.features, options.dp_kind, options.dp_reduce);
  return out;
}

SampleLoss sample_loss(Graph& g, const ForwardNodes& fwd, int label, double phi, bool use_dp) {
  SampleLoss loss;
  loss.cls = objective::cls_term(g, fwd.video_score, label);
  loss.dp = objective::dp_term(g, fwd.deviation, label);
  loss.total = use_dp ? add(g, loss.cls, scale(g, loss.dp, phi)) : loss.cls;
  return loss;
}

}  // namespace mdp::model
