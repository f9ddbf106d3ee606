#pragma once

#include <cstddef>

#include "mdp/corpus.hpp"
#include "mdp/tensor.hpp"

namespace mdp::align {

// One token (row) per frame.
struct TokenSequence {
  corpus::Modality modality = corpus::Modality::kVisual;
  Tensor2D tokens;  // n_steps x dim

  std::size_t n_steps() const { return tokens.rows(); }
  std::size_t dim() const { return tokens.cols(); }
};

// Flattens each frame's raw_dim values into one token, widening to double.
// No learned projection happens here.
TokenSequence tokenize(const corpus::FeatureMatrix& features);

// Mean pooling into `target_steps` bins; bin i covers source steps
// [floor(i*n/T), floor((i+1)*n/T)). Upsampling is refused.
// Throws ContractError for T == 0 and AlignmentError for T > n_steps.
TokenSequence temporal_pool(const TokenSequence& seq, std::size_t target_steps);

}  // namespace mdp::align
