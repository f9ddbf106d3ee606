#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdp/corpus.hpp"
#include "mdp/metrics.hpp"
#include "mdp/trainer.hpp"

namespace mdp {

struct AblateConfig {
  // Component grid; names are baseline, cma, dp, full.
  std::vector<std::string> grid{"baseline", "cma", "dp", "full"};
  // Deviation-measure sweep run on the full model.
  std::vector<std::string> dp_sweep{"L1", "L2", "MSE"};
  std::vector<std::uint64_t> seeds{0, 1, 2};
};

// One JSON document:
//   {"data": {...generator fields..., "dir": "data"},
//    "model": {"T": 64, "d": 32},
//    "train": {"lr", "batch_size", "phi", "epochs", "seed", "dp_kind",
//              "dp_reduce", "use_cma", "use_dp", "theta"},
//    "eval": {"preset": "lavdf", "timeline": false, "svg": false},
//    "ablate": {"grid", "dp_sweep", "seeds"}}
// Every section and key is optional; unknown keys are rejected.
struct RunConfig {
  corpus::GenConfig data;
  std::filesystem::path data_dir = "data";
  train::TrainConfig train;  // model.T / model.d land in train.steps / train.d
  metrics::EvalConfig eval = metrics::eval_preset("lavdf");
  bool timeline = false;
  bool svg = false;
  AblateConfig ablate;
};

// `overrides` are "section.key=value" strings (nested keys allowed, e.g.
// data.forgery.shift=0.3). The value is parsed as JSON, falling back to a
// plain string. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text,
                           std::span<const std::string> overrides = {});
// Throws IoError if the file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path,
                          std::span<const std::string> overrides = {});
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace mdp
