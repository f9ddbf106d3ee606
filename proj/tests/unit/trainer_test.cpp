#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "mdp/corpus.hpp"
#include "mdp/error.hpp"
#include "mdp/grad_check.hpp"
#include "mdp/gradcheck_suite.hpp"
#include "mdp/trainer.hpp"
#include "temp_dir.hpp"

namespace mdp::train {
namespace {

using mdp::testing::TempDir;

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.steps = 8;
  cfg.d = 4;
  cfg.batch_size = 3;
  cfg.epochs = 2;
  cfg.lr = 1e-2;
  return cfg;
}

// Random aligned inputs; forged videos get a step change halfway through.
std::vector<TrainingSample> random_samples(std::size_t n, std::size_t steps, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<TrainingSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    TrainingSample s;
    s.video_id = "v" + std::to_string(i);
    s.label = static_cast<int>(i % 2);
    s.inputs.visual = Tensor2D(steps, 6);
    s.inputs.audio = Tensor2D(steps, 4);
    for (std::size_t t = 0; t < steps; ++t) {
      const double jump = s.label && t >= steps / 2 ? 2.0 : 0.0;
      for (double& v : s.inputs.visual.row(t)) v = rng.normal() * 0.1 + jump;
      for (double& v : s.inputs.audio.row(t)) v = rng.normal() * 0.1 - jump;
    }
    s.inputs.duration_s = static_cast<double>(steps);
    out.push_back(std::move(s));
  }
  return out;
}

// ------------------------------------------------------------------ adam --

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  std::vector<Tensor2D> params{Tensor2D::from_rows({{1, -2}, {3, 4}})};
  const auto before = params;
  auto state = make_adam_state(params);
  const std::vector<Tensor2D> grads{Tensor2D(2, 2)};
  for (int i = 0; i < 5; ++i) adam_step(params, grads, state, {});
  EXPECT_EQ(params, before);
  EXPECT_EQ(state.step, 5u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<Tensor2D> params{Tensor2D(1, 1, 0.0)};
  auto state = make_adam_state(params);
  adam_step(params, std::vector<Tensor2D>{Tensor2D(1, 1, 1.0)}, state, {});
  EXPECT_NEAR(params[0](0, 0), -1e-5 / (1 + 1e-8), 1e-15);
}

TEST(Adam, ConstantGradientDriftsAtLearningRate) {
  std::vector<Tensor2D> params{Tensor2D(1, 1, 0.0)};
  auto state = make_adam_state(params);
  AdamConfig cfg;
  cfg.lr = 1e-3;
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    adam_step(params, std::vector<Tensor2D>{Tensor2D(1, 1, 0.3)}, state, cfg);
    const double x = params[0](0, 0);
    EXPECT_LT(x, prev);
    EXPECT_NEAR(prev - x, cfg.lr, 1e-9);
    prev = x;
  }
}

TEST(Adam, ShapeMismatchRejected) {
  std::vector<Tensor2D> params{Tensor2D(2, 2)};
  auto state = make_adam_state(params);
  EXPECT_THROW(adam_step(params, std::vector<Tensor2D>{Tensor2D(1, 2)}, state, {}),
               DimensionError);
}

// ------------------------------------------------------------ training --

TEST(Train, ZeroEpochsReturnsInitialization) {
  auto cfg = small_config();
  cfg.epochs = 0;
  const auto samples = random_samples(4, cfg.steps, 1);
  const auto result = train(samples, cfg);
  EXPECT_TRUE(result.log.empty());
  EXPECT_EQ(result.checkpoint, initialize(cfg, 6, 4));
  EXPECT_EQ(result.checkpoint.epoch, 0u);
}

TEST(Train, SameSeedIsBitIdentical) {
  const auto cfg = small_config();
  const auto samples = random_samples(7, cfg.steps, 2);
  const auto a = train(samples, cfg), b = train(samples, cfg);
  EXPECT_EQ(encode_checkpoint(a.checkpoint), encode_checkpoint(b.checkpoint));
  auto other = cfg;
  other.seed = 1;
  EXPECT_NE(train(samples, other).checkpoint.params, a.checkpoint.params);
}

TEST(Train, LogRecordsEveryEpoch) {
  auto cfg = small_config();
  cfg.epochs = 3;
  const auto result = train(random_samples(5, cfg.steps, 3), cfg);
  ASSERT_EQ(result.log.size(), 3u);
  for (std::size_t e = 0; e < 3; ++e) {
    const auto& l = result.log[e];
    EXPECT_EQ(l.epoch, e + 1);
    EXPECT_NEAR(l.total, l.l_cls + cfg.phi * l.l_dp, 1e-12);
    EXPECT_GE(l.acc, 0.0);
    EXPECT_LE(l.acc, 1.0);
  }
  EXPECT_EQ(result.checkpoint.epoch, 3u);
}

TEST(Train, WithoutDpTermTheTotalIsClassification) {
  auto cfg = small_config();
  cfg.use_dp = false;
  cfg.use_cma = false;
  const auto result = train(random_samples(4, cfg.steps, 3), cfg);
  for (const auto& l : result.log) EXPECT_DOUBLE_EQ(l.total, l.l_cls);
}

TEST(Train, LossDecreasesOnSeparableData) {
  auto cfg = small_config();
  cfg.epochs = 15;
  const auto result = train(random_samples(12, cfg.steps, 4), cfg);
  EXPECT_LT(result.log.back().total, result.log.front().total);
}

TEST(Train, EmptySetIsContractError) {
  EXPECT_THROW(train({}, small_config()), ContractError);
}

TEST(Train, MismatchedInputsNameTheVideo) {
  const auto cfg = small_config();
  auto samples = random_samples(3, cfg.steps, 5);
  samples[2].inputs.audio = Tensor2D(cfg.steps, 5);
  samples[2].video_id = "odd_one";
  try {
    train(samples, cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("odd_one"), std::string::npos);
  }
}

TEST(Train, ResumeEqualsUninterruptedRun) {
  auto cfg = small_config();
  const auto samples = random_samples(7, cfg.steps, 6);
  const auto full = train(samples, cfg);

  cfg.epochs = 1;
  auto half = train(samples, cfg);
  TempDir dir;
  save_checkpoint(dir / "c.mdpc", half.checkpoint);
  Checkpoint resumed = load_checkpoint(dir / "c.mdpc");
  run_epochs(resumed, samples, 1);
  resumed.config.epochs = 2;
  EXPECT_EQ(encode_checkpoint(resumed), encode_checkpoint(full.checkpoint));
}

TEST(Train, ValidationNamesField) {
  auto cfg = small_config();
  cfg.lr = -1;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = small_config();
  cfg.batch_size = 0;
  try {
    validate(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("batch_size"), std::string::npos);
  }
}

// ---------------------------------------------------------- checkpoint --

TEST(Checkpoint, RoundTripIsBitExact) {
  const auto cfg = small_config();
  const auto ckpt = train(random_samples(4, cfg.steps, 7), cfg).checkpoint;
  const auto bytes = encode_checkpoint(ckpt);
  const Checkpoint back = decode_checkpoint(bytes);
  EXPECT_EQ(back, ckpt);
  EXPECT_EQ(encode_checkpoint(back), bytes);
}

TEST(Checkpoint, CorruptionIsDetected) {
  const auto cfg = small_config();
  auto bytes = encode_checkpoint(initialize(cfg, 6, 4));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), FormatError);
  bad = bytes;
  bad[4] = 9;
  EXPECT_THROW(decode_checkpoint(bad), FormatError);
  bad = bytes;
  bad.resize(bad.size() - 3);
  EXPECT_THROW(decode_checkpoint(bad), LengthError);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(decode_checkpoint(bad), LengthError);
  TempDir dir;
  EXPECT_THROW(load_checkpoint(dir / "missing.mdpc"), IoError);
}

TEST(Checkpoint, ConfigJsonRoundTrip) {
  auto cfg = small_config();
  cfg.dp_kind = objective::DeviationKind::kL1;
  cfg.dp_reduce = objective::DeviationReduce::kSum;
  cfg.use_cma = false;
  cfg.theta = 0.375;
  EXPECT_EQ(train_config_from_json(train_config_to_json(cfg)), cfg);
}

// ----------------------------------------------------------- inference --

TEST(Infer, DeterministicAndConsistent) {
  const auto cfg = small_config();
  const auto samples = random_samples(4, cfg.steps, 8);
  const auto ckpt = train(samples, cfg).checkpoint;
  const auto a = infer(ckpt, samples[1].inputs), b = infer(ckpt, samples[1].inputs);
  EXPECT_EQ(a.fas.probs, b.fas.probs);
  EXPECT_EQ(a.proposals, b.proposals);
  EXPECT_EQ(a.segments, localize::decode_segments(a.fas, cfg.theta));
  EXPECT_EQ(a.fas.steps(), cfg.steps);
}

TEST(Infer, DimensionMismatchIsConfigError) {
  const auto cfg = small_config();
  const auto ckpt = initialize(cfg, 6, 4);
  auto inputs = random_samples(1, cfg.steps + 2, 9)[0].inputs;
  EXPECT_THROW(infer(ckpt, inputs), ConfigError);
  inputs = random_samples(1, cfg.steps, 9)[0].inputs;
  inputs.visual = Tensor2D(cfg.steps, 7);
  EXPECT_THROW(infer(ckpt, inputs), ConfigError);
}

// ------------------------------------------------------------ gradient --

TEST(Gradients, FullObjectiveMatchesFiniteDifferences) {
  model::ModelDims dims{5, 3, 4, 6};
  Xoshiro256 rng(10);
  const auto params = model::init_params(dims, rng);
  const auto samples = random_samples(2, dims.steps, 11);
  std::vector<model::VideoInputs> inputs;
  for (auto s : samples) {
    s.inputs.visual = Tensor2D(dims.steps, 5);
    s.inputs.audio = Tensor2D(dims.steps, 3);
    for (double& v : s.inputs.visual.data()) v = rng.normal();
    for (double& v : s.inputs.audio.data()) v = rng.normal();
    inputs.push_back(s.inputs);
  }
  auto loss = [&](Graph& g, std::span<const NodeRef> refs) {
    model::ParamNodes nodes;
    std::copy(refs.begin(), refs.end(), nodes.refs.begin());
    NodeRef sum{};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto fwd = model::forward(g, nodes, inputs[i], {});
      const auto l = model::sample_loss(g, fwd, samples[i].label, 0.5, true);
      sum = i == 0 ? l.total : add(g, sum, l.total);
    }
    return scale(g, sum, 0.5);
  };
  const auto result = grad_check(loss, params.tensors);
  EXPECT_LT(result.max_rel_error, 1e-4);
}

TEST(Gradients, SuiteCoversEveryPrimitiveOnceAndPasses) {
  const auto report = run_gradcheck_suite();
  EXPECT_TRUE(report.all_passed());
  std::set<std::string> names;
  for (const auto& e : report.entries) names.insert(e.name);
  for (int k = static_cast<int>(OpKind::kMatMul); k <= static_cast<int>(OpKind::kNormalizeL1Rows);
       ++k) {
    EXPECT_TRUE(names.count(std::string(op_name(static_cast<OpKind>(k))))) << k;
  }
  EXPECT_TRUE(names.count("mdp_loss"));
}

TEST(Gradients, SuiteCatchesCorruptedMatmul) {
  const auto report = run_gradcheck_suite(std::pair{OpKind::kMatMul, 1.5});
  EXPECT_FALSE(report.all_passed());
}

// --------------------------------------------------------------- split --

// Deleting segment spans from the training annotations must not change
// anything the trainer produces.
TEST(Firewall, SegmentSpansDoNotReachTraining) {
  TempDir dir;
  corpus::GenConfig gen;
  gen.duration_min_s = 4.0;
  gen.duration_max_s = 5.0;
  corpus::generate_split(gen, "train", 6, dir / "a");
  std::filesystem::copy(dir / "a", dir / "b", std::filesystem::copy_options::recursive);
  {
    std::ifstream in(dir / "b" / "annotations.json");
    auto j = nlohmann::json::parse(in);
    for (auto& v : j["videos"]) v.erase("segments");
    std::ofstream(dir / "b" / "annotations.json") << j.dump(2);
  }
  auto cfg = small_config();
  cfg.steps = 16;
  const auto a = train(load_samples(dir / "a", cfg.steps), cfg);
  const auto b = train(load_samples(dir / "b", cfg.steps), cfg);
  EXPECT_EQ(encode_checkpoint(a.checkpoint), encode_checkpoint(b.checkpoint));
}

TEST(LoadSamples, PoolsToRequestedSteps) {
  TempDir dir;
  corpus::GenConfig gen;
  gen.duration_min_s = gen.duration_max_s = 4.0;
  corpus::generate_split(gen, "train", 2, dir.path());
  const auto samples = load_samples(dir.path(), 16);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].inputs.visual.rows(), 16u);
  EXPECT_EQ(samples[0].inputs.audio.cols(), gen.raw_dim_a);
  EXPECT_THROW(load_samples(dir.path(), 1000), AlignmentError);
}

TEST(Log, CsvHeader) {
  TempDir dir;
  write_log_csv(dir / "log.csv", std::vector<EpochLog>{{1, 0.5, 0.25, 0.625, 0.5}});
  std::ifstream in(dir / "log.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "epoch,l_cls,l_dp,total,acc");
  EXPECT_EQ(row.substr(0, 2), "1,");
}

}  // namespace
}  // namespace mdp::train
