#include "mdp/experiment.hpp"

#include <algorithm>

#include "mdp/error.hpp"

namespace mdp::experiment {

std::vector<localize::VideoPredictions> predict(const train::Checkpoint& ckpt,
                                                std::span<const train::TrainingSample> samples) {
  std::vector<localize::VideoPredictions> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({s.video_id, train::infer(ckpt, s.inputs).proposals});
  }
  return out;
}

std::vector<localize::VideoActivation> activations(const train::Checkpoint& ckpt,
                                                   std::span<const train::TrainingSample> samples) {
  std::vector<localize::VideoActivation> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({s.video_id, train::infer(ckpt, s.inputs).fas});
  return out;
}

Variant component_variant(const std::string& name) {
  if (name == "baseline") return {name, false, false};
  if (name == "cma") return {name, true, false};
  if (name == "dp") return {name, false, true};
  if (name == "full") return {name, true, true};
  throw ConfigError("unknown ablation variant '" + name + "'");
}

Variant deviation_variant(const std::string& kind) {
  return {kind, true, true, objective::deviation_kind_from_string(kind)};
}

Runner::Runner(const SplitData& data, train::TrainConfig base, metrics::EvalConfig eval)
    : data_(data), base_(base), eval_(std::move(eval)) {}

Runner::Result& Runner::result(const Variant& v, std::uint64_t seed) {
  const Key key{v.use_cma, v.use_dp, static_cast<int>(v.dp_kind), seed};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  if (progress_) progress_(v, seed);
  train::TrainConfig cfg = base_;
  cfg.use_cma = v.use_cma;
  cfg.use_dp = v.use_dp;
  cfg.dp_kind = v.dp_kind;
  cfg.seed = seed;
  train::TrainResult trained = train::train(data_.train, cfg);
  metrics::EvalReport report =
      metrics::evaluate(predict(trained.checkpoint, data_.test), data_.test_annotations, eval_);
  return cache_.emplace(key, Result{std::move(trained.checkpoint), std::move(report)})
      .first->second;
}

const metrics::EvalReport& Runner::run(const Variant& v, std::uint64_t seed) {
  return result(v, seed).report;
}

const train::Checkpoint& Runner::checkpoint(const Variant& v, std::uint64_t seed) {
  return result(v, seed).checkpoint;
}

std::vector<AblationRow> Runner::table(std::span<const Variant> variants,
                                       std::span<const std::uint64_t> seeds) {
  std::vector<AblationRow> rows;
  std::vector<AblationRow> medians;
  for (const auto& v : variants) {
    std::vector<metrics::EvalReport> reports;
    for (std::uint64_t seed : seeds) {
      reports.push_back(run(v, seed));
      rows.push_back({v.name, seed, reports.back()});
    }
    medians.push_back({v.name, std::nullopt, median_report(reports)});
  }
  rows.insert(rows.end(), medians.begin(), medians.end());
  return rows;
}

namespace {
double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

metrics::EvalReport median_report(std::span<const metrics::EvalReport> reports) {
  if (reports.empty()) throw ContractError("median_report: no reports");
  metrics::EvalReport out = reports[0];
  auto column = [&](auto pick) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(pick(r));
    return median(std::move(v));
  };
  for (std::size_t i = 0; i < out.ap.size(); ++i) {
    out.ap[i] = column([i](const metrics::EvalReport& r) { return r.ap.at(i); });
  }
  for (std::size_t i = 0; i < out.ar.size(); ++i) {
    out.ar[i] = column([i](const metrics::EvalReport& r) { return r.ar.at(i); });
  }
  out.ap_avg = column([](const metrics::EvalReport& r) { return r.ap_avg; });
  out.ar_avg = column([](const metrics::EvalReport& r) { return r.ar_avg; });
  return out;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
  if (rows.empty()) return "variant,seed\n";
  std::string text = "variant,seed," + metrics::report_csv_header(rows[0].report) + "\n";
  for (const auto& row : rows) {
    text += row.variant + "," + (row.seed ? std::to_string(*row.seed) : "median") + "," +
            metrics::report_csv_values(row.report) + "\n";
  }
  return text;
}

}  // namespace mdp::experiment
