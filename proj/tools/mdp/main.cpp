// mdp <gen|train|infer|eval|ablate|gradcheck> --config <path> [--out <dir>]
//     [--seed <u64>] [--set section.key=value]...
//
// Exit codes: 0 ok, 1 gradient check failed / internal error, 2 config,
// 3 I/O or file format, 4 validation.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mdp/error.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kValidation = 4 };

void add_common(CLI::App* cmd, mdp::cli::CommonArgs& args, bool with_seed = true) {
  cmd->add_option("--config", args.config, "JSON run configuration");
  cmd->add_option("--out", args.out, "Output directory");
  if (with_seed) cmd->add_option("--seed", args.seed, "Override the seed");
  cmd->add_option("--set", args.sets, "Override a config value (section.key=value)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly-supervised audio-visual temporal forgery localization"};
  app.require_subcommand(1);

  mdp::cli::CommonArgs common;
  std::filesystem::path resume;
  mdp::cli::InferArgs infer_args;
  mdp::cli::EvalArgs eval_args;
  std::string mutate;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic train/test corpus");
  add_common(gen, common);
  auto* train = app.add_subcommand("train", "Train on <data>/train");
  add_common(train, common);
  train->add_option("--resume", resume, "Continue from a checkpoint");
  auto* infer = app.add_subcommand("infer", "Write predictions and activations for a split");
  add_common(infer, common, false);
  infer->add_option("--checkpoint", infer_args.checkpoint, "Checkpoint (default <out>/model.mdpc)");
  infer->add_option("--split", infer_args.split, "Split to run on (default test)");
  auto* eval = app.add_subcommand("eval", "Score predictions against annotations");
  add_common(eval, common, false);
  eval->add_option("--predictions", eval_args.predictions, "Predictions JSON");
  eval->add_option("--annotations", eval_args.annotations, "Annotations JSON");
  auto* ablate = app.add_subcommand("ablate", "Component ablation and deviation-measure sweep");
  add_common(ablate, common);
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck->add_option("--mutate", mutate)->group("");  // test hook: op[:factor]

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (gen->parsed()) return mdp::cli::cmd_gen(common);
    if (train->parsed()) return mdp::cli::cmd_train(common, resume);
    if (infer->parsed()) return mdp::cli::cmd_infer(common, infer_args);
    if (eval->parsed()) return mdp::cli::cmd_eval(common, eval_args);
    if (ablate->parsed()) return mdp::cli::cmd_ablate(common);
    if (gradcheck->parsed()) return mdp::cli::cmd_gradcheck(mutate);
  } catch (const mdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const mdp::AlignmentError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const mdp::PlacementError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const mdp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const mdp::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kIo;
  } catch (const mdp::LengthError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kIo;
  } catch (const mdp::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
