#include "mdp/trainer.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "json_util.hpp"
#include "mdp/error.hpp"

namespace mdp::train {

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ConfigError("train." + field + ": " + what);
  };
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) fail("lr", "must be > 0");
  if (c.batch_size == 0) fail("batch_size", "must be > 0");
  if (!(c.phi >= 0.0) || !std::isfinite(c.phi)) fail("phi", "must be >= 0");
  if (c.steps < 2) throw ConfigError("model.T: must be >= 2");
  if (c.d == 0) throw ConfigError("model.d: must be > 0");
  if (!(c.theta > 0.0 && c.theta < 1.0)) fail("theta", "must lie in (0, 1)");
}

// ------------------------------------------------------------------ adam --

AdamState make_adam_state(std::span<const Tensor2D> params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.rows(), p.cols());
    s.v.emplace_back(p.rows(), p.cols());
  }
  return s;
}

void adam_step(std::span<Tensor2D> params, std::span<const Tensor2D> grads, AdamState& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw DimensionError(fmt::format("adam_step: {} params, {} grads, {} moments",
                                     params.size(), grads.size(), state.m.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || !params[i].same_shape(state.m[i]) ||
        !params[i].same_shape(state.v[i])) {
      throw DimensionError(fmt::format("adam_step: tensor {} param {} vs grad {}", i,
                                       params[i].shape_string(), grads[i].shape_string()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].data();
    auto g = grads[i].data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

// ------------------------------------------------------------ training --

Checkpoint initialize(const TrainConfig& cfg, std::size_t raw_dim_v, std::size_t raw_dim_a) {
  validate(cfg);
  Checkpoint ckpt;
  ckpt.config = cfg;
  Xoshiro256 init_rng(derive_seed(cfg.seed, 1));
  ckpt.params = model::init_params({raw_dim_v, raw_dim_a, cfg.d, cfg.steps}, init_rng);
  ckpt.adam = make_adam_state(ckpt.params.tensors);
  ckpt.rng = Xoshiro256(derive_seed(cfg.seed, 2)).state();
  return ckpt;
}

namespace {

void check_inputs(const model::ModelDims& dims, const model::VideoInputs& in,
                  const std::string& video_id) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("video '" + video_id + "': " + what);
  };
  if (in.visual.rows() != dims.steps || in.audio.rows() != dims.steps) {
    fail(fmt::format("inputs have {}/{} steps but the model expects T={}", in.visual.rows(),
                     in.audio.rows(), dims.steps));
  }
  if (in.visual.cols() != dims.raw_dim_v || in.audio.cols() != dims.raw_dim_a) {
    fail(fmt::format("feature dims {}/{} do not match the model's {}/{}", in.visual.cols(),
                     in.audio.cols(), dims.raw_dim_v, dims.raw_dim_a));
  }
}

}  // namespace

std::vector<EpochLog> run_epochs(Checkpoint& ckpt, std::span<const TrainingSample> samples,
                                 std::size_t epochs) {
  const TrainConfig& cfg = ckpt.config;
  validate(cfg);
  if (epochs == 0) return {};
  if (samples.empty()) throw ContractError("train: no training samples");
  for (const auto& s : samples) check_inputs(ckpt.params.dims, s.inputs, s.video_id);

  const model::ModelOptions options = cfg.model_options();
  const AdamConfig adam{cfg.lr};
  Xoshiro256 rng;
  rng.set_state(ckpt.rng);

  std::vector<std::size_t> order(samples.size());
  std::vector<EpochLog> log;
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }

    EpochLog entry;
    entry.epoch = ckpt.epoch + 1;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<Tensor2D> batch_grad;
      // Per-video graphs; gradients summed in batch order so the result does
      // not depend on how the forward passes are scheduled.
      for (std::size_t k = start; k < end; ++k) {
        const TrainingSample& s = samples[order[k]];
        Graph g;
        const model::ParamNodes nodes = model::bind(g, ckpt.params);
        const model::ForwardNodes fwd = model::forward(g, nodes, s.inputs, options);
        const model::SampleLoss loss = model::sample_loss(g, fwd, s.label, cfg.phi, cfg.use_dp);
        g.backward(loss.total);

        entry.l_cls += g.value(loss.cls)(0, 0);
        entry.l_dp += g.value(loss.dp)(0, 0);
        entry.total += g.value(loss.total)(0, 0);
        const Tensor2D& score = g.value(fwd.video_score);
        if ((score(0, 1) > score(0, 0) ? 1 : 0) == s.label) ++correct;

        std::vector<Tensor2D> grads = model::gradients(g, nodes);
        if (batch_grad.empty()) {
          batch_grad = std::move(grads);
        } else {
          for (std::size_t p = 0; p < grads.size(); ++p) {
            auto dst = batch_grad[p].data();
            auto src = grads[p].data();
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
          }
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& t : batch_grad) {
        for (double& v : t.data()) v *= inv;
      }
      adam_step(ckpt.params.tensors, batch_grad, ckpt.adam, adam);
    }
    const double n = static_cast<double>(samples.size());
    entry.l_cls /= n;
    entry.l_dp /= n;
    entry.total /= n;
    entry.acc = static_cast<double>(correct) / n;
    ++ckpt.epoch;
    log.push_back(entry);
  }
  ckpt.rng = rng.state();
  return log;
}

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& cfg) {
  if (samples.empty()) throw ContractError("train: no training samples");
  TrainResult result;
  result.checkpoint =
      initialize(cfg, samples[0].inputs.visual.cols(), samples[0].inputs.audio.cols());
  result.log = run_epochs(result.checkpoint, samples, cfg.epochs);
  return result;
}

std::vector<TrainingSample> load_samples(const std::filesystem::path& split_dir,
                                         std::size_t steps) {
  const corpus::DatasetManifest manifest = corpus::read_manifest(split_dir);
  std::map<std::string, corpus::VideoLabel> labels;
  for (auto& l : corpus::read_video_labels(manifest.root / manifest.annotations)) {
    labels.emplace(l.video_id, l);
  }
  std::vector<TrainingSample> out;
  out.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    const auto it = labels.find(rec.video_id);
    if (it == labels.end()) {
      throw ValidationError("manifest video '" + rec.video_id + "' has no annotation entry");
    }
    try {
      const auto visual = corpus::read_features(manifest.root / rec.visual);
      const auto audio = corpus::read_features(manifest.root / rec.audio);
      out.push_back({rec.video_id, it->second.label,
                     model::prepare_inputs(visual, audio, it->second.duration_s, steps)});
    } catch (const AlignmentError& e) {
      throw AlignmentError("video '" + rec.video_id + "': " + e.what());
    } catch (const DimensionError& e) {
      throw DimensionError("video '" + rec.video_id + "': " + e.what());
    }
  }
  return out;
}

void write_log_csv(const std::filesystem::path& path, std::span<const EpochLog> log) {
  std::string text = "epoch,l_cls,l_dp,total,acc\n";
  for (const auto& e : log) {
    text += fmt::format("{},{:.10g},{:.10g},{:.10g},{:.6f}\n", e.epoch, e.l_cls, e.l_dp, e.total,
                        e.acc);
  }
  detail::write_text_file(path, text);
}

// ----------------------------------------------------------- inference --

Inference infer(const Checkpoint& ckpt, const model::VideoInputs& inputs) {
  check_inputs(ckpt.params.dims, inputs, "<input>");
  Graph g;
  const model::ParamNodes nodes = model::bind(g, ckpt.params);
  const model::ForwardNodes fwd = model::forward(g, nodes, inputs, ckpt.config.model_options());
  Inference out;
  out.fas = {g.value(fwd.probs), inputs.duration_s};
  out.segments = localize::decode_segments(out.fas, ckpt.config.theta);
  const auto grid = localize::default_theta_grid();
  out.proposals = localize::rank_proposals(out.fas, grid);
  return out;
}

}  // namespace mdp::train
