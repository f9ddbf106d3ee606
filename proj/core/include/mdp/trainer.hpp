#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdp/localize.hpp"
#include "mdp/model.hpp"
#include "mdp/rng.hpp"

namespace mdp::train {

struct TrainConfig {
  double lr = 1e-5;
  std::size_t batch_size = 32;
  double phi = 0.5;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  std::size_t steps = 64;  // T
  std::size_t d = 32;
  objective::DeviationKind dp_kind = objective::DeviationKind::kMse;
  objective::DeviationReduce dp_reduce = objective::DeviationReduce::kMean;
  bool use_cma = true;
  bool use_dp = true;
  double theta = 0.5;

  model::ModelOptions model_options() const { return {use_cma, dp_kind, dp_reduce}; }
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Throws ConfigError naming the field.
void validate(const TrainConfig& cfg);

// ------------------------------------------------------------------ adam --

struct AdamConfig {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor2D> m;
  std::vector<Tensor2D> v;
  std::uint64_t step = 0;  // number of updates applied so far
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

AdamState make_adam_state(std::span<const Tensor2D> params);

// One bias-corrected Adam update; increments state.step first.
void adam_step(std::span<Tensor2D> params, std::span<const Tensor2D> grads, AdamState& state,
               const AdamConfig& cfg);

// ------------------------------------------------------------ training --

struct TrainingSample {
  std::string video_id;
  int label = 0;
  model::VideoInputs inputs;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double l_cls = 0.0;
  double l_dp = 0.0;
  double total = 0.0;
  double acc = 0.0;
};

struct Checkpoint {
  TrainConfig config;
  model::ModelParams params;
  AdamState adam;
  std::uint32_t epoch = 0;  // completed epochs
  Xoshiro256::State rng{};   // shuffle stream
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Freshly initialised model and optimizer for the given feature dims.
Checkpoint initialize(const TrainConfig& cfg, std::size_t raw_dim_v, std::size_t raw_dim_a);

// Runs `epochs` further epochs, updating the checkpoint in place.
std::vector<EpochLog> run_epochs(Checkpoint& ckpt, std::span<const TrainingSample> samples,
                                 std::size_t epochs);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
};

// initialize + run_epochs(cfg.epochs). Throws ContractError on an empty set.
TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& cfg);

// Loads a split produced by corpus::generate_split. Only video-level labels
// are read from the annotations; features are pooled to `steps`.
std::vector<TrainingSample> load_samples(const std::filesystem::path& split_dir,
                                         std::size_t steps);

void write_log_csv(const std::filesystem::path& path, std::span<const EpochLog> log);

// Binary layout, little-endian:
//   "MDPC" u8 version=1, 3 zero bytes
//   u32 len + config JSON
//   u32 raw_dim_v, raw_dim_a, d, T
//   u32 count, then per tensor: u32 len + name, u32 rows, u32 cols, f64 data
//   u64 adam step, then m and v for every tensor (f64 data, same shapes)
//   u32 epoch, 4 x u64 PRNG state
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const std::string& text);

// ----------------------------------------------------------- inference --

struct Inference {
  localize::ForgeryActivationSequence fas;
  std::vector<corpus::SegmentSpan> segments;  // decode at config theta
  std::vector<localize::SegmentProposal> proposals;
};

// Throws ConfigError when the inputs do not match the checkpoint's T or
// feature dims.
Inference infer(const Checkpoint& ckpt, const model::VideoInputs& inputs);

}  // namespace mdp::train
