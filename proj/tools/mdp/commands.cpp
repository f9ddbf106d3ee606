#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include <fmt/format.h>

#include "mdp/config.hpp"
#include "mdp/error.hpp"
#include "mdp/experiment.hpp"
#include "mdp/gradcheck_suite.hpp"
#include "mdp/report.hpp"
#include "mdp/trainer.hpp"

namespace mdp::cli {

namespace fs = std::filesystem;

namespace {

RunConfig resolve(const CommonArgs& args) {
  if (args.config.empty()) return parse_run_config("{}", args.sets);
  return load_run_config(args.config, args.sets);
}

fs::path out_dir(const CommonArgs& args, const fs::path& fallback) {
  const fs::path dir = args.out.empty() ? fallback : args.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Wall-clock figures go to stderr only, so files stay byte-reproducible.
class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

int cmd_gen(const CommonArgs& args) {
  RunConfig cfg = resolve(args);
  if (args.seed) cfg.data.seed = *args.seed;
  const fs::path out = out_dir(args, cfg.data_dir);
  Stopwatch clock;
  const corpus::Dataset ds = corpus::generate_dataset(cfg.data, out);
  std::cout << fmt::format("generated {} train / {} test videos in {}\n", ds.train.records.size(),
                           ds.test.records.size(), out.string());
  std::cerr << fmt::format("gen: {:.1f}s\n", clock.seconds());
  return 0;
}

int cmd_train(const CommonArgs& args, const fs::path& resume) {
  RunConfig cfg = resolve(args);
  if (args.seed) cfg.train.seed = *args.seed;
  const fs::path out = out_dir(args, "run");
  const auto samples = train::load_samples(cfg.data_dir / "train", cfg.train.steps);
  if (samples.empty()) throw ValidationError("training split has no videos");

  Stopwatch clock;
  train::Checkpoint ckpt;
  if (resume.empty()) {
    ckpt = train::initialize(cfg.train, samples[0].inputs.visual.cols(),
                             samples[0].inputs.audio.cols());
  } else {
    ckpt = train::load_checkpoint(resume);
    if (!(ckpt.config == cfg.train)) {
      // Only the epoch budget may differ when continuing a run.
      train::TrainConfig a = ckpt.config, b = cfg.train;
      a.epochs = b.epochs = 0;
      if (!(a == b)) throw ConfigError("--resume: checkpoint was trained with a different config");
      ckpt.config.epochs = cfg.train.epochs;
    }
  }
  const std::size_t remaining =
      cfg.train.epochs > ckpt.epoch ? cfg.train.epochs - ckpt.epoch : 0;

  std::vector<train::EpochLog> log;
  for (std::size_t e = 0; e < remaining; ++e) {
    const auto entry = train::run_epochs(ckpt, samples, 1);
    log.insert(log.end(), entry.begin(), entry.end());
    const auto& l = log.back();
    std::cout << fmt::format("epoch {:3d}  l_cls {:.6f}  l_dp {:.6f}  total {:.6f}  acc {:.4f}\n",
                             l.epoch, l.l_cls, l.l_dp, l.total, l.acc);
  }
  train::save_checkpoint(out / "model.mdpc", ckpt);
  train::write_log_csv(out / "train_log.csv", log);
  write_file(out / "config.json", run_config_to_json(cfg));
  std::cerr << fmt::format("train: {} epochs in {:.1f}s\n", remaining, clock.seconds());
  return 0;
}

int cmd_infer(const CommonArgs& args, const InferArgs& infer) {
  const RunConfig cfg = resolve(args);
  const fs::path out = out_dir(args, "run");
  const fs::path ckpt_path = infer.checkpoint.empty() ? out / "model.mdpc" : infer.checkpoint;
  const train::Checkpoint ckpt = train::load_checkpoint(ckpt_path);
  const auto samples = train::load_samples(cfg.data_dir / infer.split, ckpt.config.steps);

  std::vector<localize::VideoPredictions> preds;
  std::vector<localize::VideoActivation> acts;
  std::size_t decoded = 0;
  for (const auto& s : samples) {
    auto r = train::infer(ckpt, s.inputs);
    decoded += r.segments.size();
    preds.push_back({s.video_id, std::move(r.proposals)});
    acts.push_back({s.video_id, std::move(r.fas)});
  }
  localize::write_predictions(out / "predictions.json", preds);
  localize::write_activations(out / "fas.json", acts);
  std::cout << fmt::format("{} videos, {} segments decoded at theta={}\n", samples.size(),
                           decoded, ckpt.config.theta);
  return 0;
}

int cmd_eval(const CommonArgs& args, const EvalArgs& eval) {
  const RunConfig cfg = resolve(args);
  const fs::path out = out_dir(args, "run");
  const fs::path pred_path = eval.predictions.empty() ? out / "predictions.json" : eval.predictions;
  const fs::path ann_path =
      eval.annotations.empty() ? cfg.data_dir / "test" / "annotations.json" : eval.annotations;

  const auto predictions = localize::read_predictions(pred_path);
  const auto annotations = corpus::read_annotations(ann_path);
  const metrics::EvalReport report = metrics::evaluate(predictions, annotations, cfg.eval);
  metrics::write_report_json(out / "report.json", report);
  metrics::write_report_csv(out / "report.csv", report);
  std::cout << metrics::report_csv_header(report) << "\n"
            << metrics::report_csv_values(report) << "\n";

  if (cfg.timeline || cfg.svg) {
    const fs::path fas_path = pred_path.parent_path() / "fas.json";
    const auto acts = localize::read_activations(fas_path);
    std::map<std::string, const corpus::VideoAnnotation*> gt;
    for (const auto& a : annotations) gt[a.video_id] = &a;
    const fs::path dir = out / "timelines";
    fs::create_directories(dir);
    for (const auto& a : acts) {
      const auto it = gt.find(a.video_id);
      if (it == gt.end()) throw ValidationError("fas.json: unknown video_id '" + a.video_id + "'");
      if (cfg.timeline) write_file(dir / (a.video_id + ".csv"), report::timeline_csv(a.fas));
      if (cfg.svg) {
        const auto decoded = localize::decode_segments(a.fas, cfg.train.theta);
        write_file(dir / (a.video_id + ".svg"),
                   report::timeline_svg(a.video_id, a.fas, it->second->segments, decoded));
      }
    }
  }
  return 0;
}

int cmd_ablate(const CommonArgs& args) {
  RunConfig cfg = resolve(args);
  if (args.seed) cfg.ablate.seeds = {*args.seed};
  const fs::path out = out_dir(args, "ablation");
  experiment::SplitData data{
      train::load_samples(cfg.data_dir / "train", cfg.train.steps),
      train::load_samples(cfg.data_dir / "test", cfg.train.steps),
      corpus::read_annotations(cfg.data_dir / "test" / "annotations.json")};

  Stopwatch clock;
  experiment::Runner runner(data, cfg.train, cfg.eval);
  runner.on_progress([&](const experiment::Variant& v, std::uint64_t seed) {
    std::cerr << fmt::format("[{:7.1f}s] training {} seed {}\n", clock.seconds(), v.name, seed);
  });

  if (!cfg.ablate.grid.empty()) {
    std::vector<experiment::Variant> variants;
    for (const auto& name : cfg.ablate.grid) variants.push_back(experiment::component_variant(name));
    const auto rows = runner.table(variants, cfg.ablate.seeds);
    const std::string csv = experiment::ablation_csv(rows);
    write_file(out / "ablation.csv", csv);
    std::cout << csv;
  }
  if (!cfg.ablate.dp_sweep.empty()) {
    std::vector<experiment::Variant> variants;
    for (const auto& k : cfg.ablate.dp_sweep) variants.push_back(experiment::deviation_variant(k));
    const auto rows = runner.table(variants, cfg.ablate.seeds);
    const std::string csv = experiment::ablation_csv(rows);
    write_file(out / "dp_sweep.csv", csv);
    std::cout << csv;
  }
  std::cerr << fmt::format("ablate: {:.1f}s\n", clock.seconds());
  return 0;
}

int cmd_gradcheck(const std::string& mutate) {
  std::optional<std::pair<OpKind, double>> corrupt;
  if (!mutate.empty()) {
    // op[:factor]
    const auto colon = mutate.find(':');
    const std::string name = mutate.substr(0, colon);
    const double factor = colon == std::string::npos ? 1.5 : std::stod(mutate.substr(colon + 1));
    bool found = false;
    for (int k = static_cast<int>(OpKind::kLeaf); k <= static_cast<int>(OpKind::kNormalizeL1Rows); ++k) {
      if (op_name(static_cast<OpKind>(k)) == name) {
        corrupt = std::pair{static_cast<OpKind>(k), factor};
        found = true;
      }
    }
    if (!found) throw ConfigError("--mutate: unknown op '" + name + "'");
  }
  Stopwatch clock;
  const GradCheckReport report = run_gradcheck_suite(corrupt);
  for (const auto& e : report.entries) {
    std::cout << fmt::format("{:<20} max_rel_err {:.3e}  {}\n", e.name, e.max_rel_error,
                             e.passed ? "ok" : "FAIL");
  }
  const bool ok = report.all_passed();
  std::cout << (ok ? "all gradients agree" : "gradient check FAILED") << fmt::format(
                   " (tolerance {:.0e})\n", report.tolerance);
  std::cerr << fmt::format("gradcheck: {:.2f}s\n", clock.seconds());
  return ok ? 0 : 1;
}

}  // namespace mdp::cli
