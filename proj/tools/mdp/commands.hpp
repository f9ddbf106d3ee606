#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mdp::cli {

struct CommonArgs {
  std::filesystem::path config;  // empty -> built-in defaults
  std::filesystem::path out;     // empty -> command default
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

struct InferArgs {
  std::filesystem::path checkpoint;  // empty -> <out>/model.mdpc
  std::string split = "test";
};

struct EvalArgs {
  std::filesystem::path predictions;  // empty -> <out>/predictions.json
  std::filesystem::path annotations;  // empty -> <data>/test/annotations.json
};

// Each returns the process exit code; library errors propagate as
// exceptions and are mapped in main.
int cmd_gen(const CommonArgs& args);
int cmd_train(const CommonArgs& args, const std::filesystem::path& resume);
int cmd_infer(const CommonArgs& args, const InferArgs& infer);
int cmd_eval(const CommonArgs& args, const EvalArgs& eval);
int cmd_ablate(const CommonArgs& args);
int cmd_gradcheck(const std::string& mutate);

}  // namespace mdp::cli
