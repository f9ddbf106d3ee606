#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mdp/corpus.hpp"
#include "mdp/localize.hpp"
#include "mdp/metrics.hpp"
#include "mdp/trainer.hpp"

namespace mdp::experiment {

// Runs a trained checkpoint over a split. Proposals feed AP/AR; the FAS
// feeds timelines.
std::vector<localize::VideoPredictions> predict(const train::Checkpoint& ckpt,
                                                std::span<const train::TrainingSample> samples);
std::vector<localize::VideoActivation> activations(const train::Checkpoint& ckpt,
                                                   std::span<const train::TrainingSample> samples);

struct Variant {
  std::string name;
  bool use_cma = true;
  bool use_dp = true;
  objective::DeviationKind dp_kind = objective::DeviationKind::kMse;
};

// baseline / cma / dp / full.
Variant component_variant(const std::string& name);
// Full model with the given deviation measure; named after the measure.
Variant deviation_variant(const std::string& kind);

struct AblationRow {
  std::string variant;
  std::optional<std::uint64_t> seed;  // empty for the median row
  metrics::EvalReport report;
};

struct SplitData {
  std::vector<train::TrainingSample> train;
  std::vector<train::TrainingSample> test;
  std::vector<corpus::VideoAnnotation> test_annotations;
};

// Trains (variant, seed) once and remembers the report, so the same
// configuration shared by several tables is only trained once.
class Runner {
 public:
  Runner(const SplitData& data, train::TrainConfig base, metrics::EvalConfig eval);

  using Progress = std::function<void(const Variant&, std::uint64_t seed)>;
  void on_progress(Progress p) { progress_ = std::move(p); }

  const metrics::EvalReport& run(const Variant& v, std::uint64_t seed);
  const train::Checkpoint& checkpoint(const Variant& v, std::uint64_t seed);

  // One row per (variant, seed) followed by one median row per variant.
  std::vector<AblationRow> table(std::span<const Variant> variants,
                                 std::span<const std::uint64_t> seeds);

 private:
  struct Result {
    train::Checkpoint checkpoint;
    metrics::EvalReport report;
  };
  using Key = std::tuple<bool, bool, int, std::uint64_t>;
  Result& result(const Variant& v, std::uint64_t seed);

  const SplitData& data_;
  train::TrainConfig base_;
  metrics::EvalConfig eval_;
  Progress progress_;
  std::map<Key, Result> cache_;
};

// Per-metric median over the given reports (mean of the two middle values
// for even counts).
metrics::EvalReport median_report(std::span<const metrics::EvalReport> reports);

// variant,seed,ap@...,ap_avg,ar@...,ar_avg; median rows use seed "median".
std::string ablation_csv(std::span<const AblationRow> rows);

}  // namespace mdp::experiment
