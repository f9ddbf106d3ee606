#pragma once

// JSON (de)serialisation of the config structs. Not installed.

#include <string>

#include "json_util.hpp"
#include "mdp/corpus.hpp"
#include "mdp/trainer.hpp"

namespace mdp::detail {

json gen_config_to_json(const corpus::GenConfig& cfg);
// Strict: unknown keys and wrong types raise ConfigError naming `path`.
// Missing keys keep their defaults.
corpus::GenConfig gen_config_from_json(const json& doc, const std::string& path);

json train_config_to_json(const train::TrainConfig& cfg);
train::TrainConfig train_config_from_json(const json& doc, const std::string& path);

}  // namespace mdp::detail
