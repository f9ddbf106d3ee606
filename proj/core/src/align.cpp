#include "mdp/align.hpp"

#include <string>

#include "mdp/error.hpp"

namespace mdp::align {

TokenSequence tokenize(const corpus::FeatureMatrix& features) {
  TokenSequence seq;
  seq.modality = features.modality;
  std::vector<double> widened(features.data.begin(), features.data.end());
  seq.tokens = Tensor2D(features.n_frames, features.raw_dim, std::move(widened));
  return seq;
}

TokenSequence temporal_pool(const TokenSequence& seq, std::size_t target_steps) {
  const std::size_t n = seq.n_steps();
  if (target_steps == 0) throw ContractError("temporal_pool: target T must be >= 1");
  if (target_steps > n) {
    throw AlignmentError("temporal_pool: cannot align " + std::to_string(n) +
                         " steps to T=" + std::to_string(target_steps) +
                         " (upsampling is not supported)");
  }
  TokenSequence out;
  out.modality = seq.modality;
  out.tokens = Tensor2D(target_steps, seq.dim());
  for (std::size_t i = 0; i < target_steps; ++i) {
    const std::size_t begin = i * n / target_steps;
    const std::size_t end = (i + 1) * n / target_steps;
    auto dst = out.tokens.row(i);
    for (std::size_t s = begin; s < end; ++s) {
      const auto src = seq.tokens.row(s);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
    const double count = static_cast<double>(end - begin);
    for (double& v : dst) v /= count;
  }
  return out;
}

}  // namespace mdp::align
