// Copyright 2026 The vbpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "test_support.hpp"
#include "vbpc/checkpoint.hpp"
#include "vbpc/config.hpp"
#include "vbpc/cross_entropy.hpp"
#include "vbpc/error.hpp"
#include "vbpc/gradcheck.hpp"
#include "vbpc/optim.hpp"
#include "vbpc/synthetic.hpp"
#include "vbpc/trainer.hpp"

namespace vbpc {
namespace {

using testing::random_matrix;
using testing::TempDir;

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.seed = 5;
  c.hidden_widths = {16, 16};
  c.feature_dim = 16;
  c.knn = 8;
  c.fps_count = 64;
  c.synth_points = 256;
  c.synth_train_scenes = 4;
  c.synth_val_scenes = 2;
  c.labels_per_scene = 20;
  c.pretrain = {40, 2, 0.01, 0.9, 0.9};
  c.finetune = {40, 2, 0.01, 0.9, 0.9};
  return c;
}

std::vector<PreparedScene> small_scenes(const ExperimentConfig& c, bool subsample) {
  return prepare_scenes(generate_synthetic_split(c.seed, c.synth_train_scenes, c.synth_points, c.num_classes,
                                                 Split::kTrain),
                        c, subsample);
}

TEST(Optimizer, ZeroMomentumIsGradientDescent) {
  Matrix p{{1, 2}};
  std::vector<Matrix> buffers;
  GradientSet g;
  g.tensors.push_back(Matrix{{0.5, -1}});
  Matrix* params[] = {&p};
  sgd_momentum_step(params, g, buffers, 0.1, 0.0);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.95);
  EXPECT_DOUBLE_EQ(p(0, 1), 2.1);
}

TEST(Optimizer, ConstantGradientReachesGeometricLimit) {
  Matrix p{{0.0}};
  std::vector<Matrix> buffers;
  GradientSet g;
  g.tensors.push_back(Matrix{{2.0}});
  Matrix* params[] = {&p};
  const double lr = 0.01, m = 0.9;
  double before = 0;
  for (int t = 0; t < 500; ++t) {
    before = p(0, 0);
    sgd_momentum_step(params, g, buffers, lr, m);
  }
  const double step = before - p(0, 0);
  EXPECT_NEAR(step, lr * 2.0 / (1 - m), 0.01 * lr * 2.0 / (1 - m));
}

TEST(Optimizer, ZeroGradientsAndBuffersLeaveParams) {
  Matrix p{{1, 2}, {3, 4}};
  const Matrix original = p;
  std::vector<Matrix> buffers;
  GradientSet g;
  g.tensors.emplace_back(2, 2);
  Matrix* params[] = {&p};
  sgd_momentum_step(params, g, buffers, 0.1, 0.99);
  EXPECT_EQ(p, original);
}

TEST(Optimizer, ShapeMismatch) {
  Matrix p(2, 2);
  std::vector<Matrix> buffers;
  GradientSet g;
  g.tensors.emplace_back(2, 3);
  Matrix* params[] = {&p};
  EXPECT_THROW(sgd_momentum_step(params, g, buffers, 0.1, 0.9), ShapeError);
}

TEST(Schedule, PolyLr) {
  EXPECT_DOUBLE_EQ(poly_lr(0, 1000, 0.1, 0.9), 0.1);
  EXPECT_DOUBLE_EQ(poly_lr(1000, 1000, 0.1, 0.9), 0.0);
  EXPECT_NEAR(poly_lr(500, 1000, 0.1, 0.9), 0.053589, 1e-6);
  EXPECT_THROW(poly_lr(1001, 1000, 0.1, 0.9), ConfigError);
}

TEST(CrossEntropy, SaturatedMargin) {
  Matrix logits(3, 4);
  SparseLabelSet l(3, 4);
  l.labels = {2, std::nullopt, 0};
  logits(0, 2) = 20;
  logits(2, 0) = 20;
  logits(1, 1) = -50;
  const CrossEntropyResult r = masked_cross_entropy(logits, l);
  EXPECT_LT(r.loss, 1e-8);
  EXPECT_EQ(r.labeled, 2u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(r.grad_logits(1, c), 0.0);
}

TEST(CrossEntropy, UniformLogits) {
  SparseLabelSet l(5, 20);
  l.labels = {3, 19, std::nullopt, 0, 7};
  EXPECT_NEAR(masked_cross_entropy(Matrix(5, 20, 0.25), l).loss, std::log(20.0), 1e-12);
}

TEST(CrossEntropy, LargeLogitsStayFinite) {
  SparseLabelSet l(1, 2);
  l.labels = {1};
  const CrossEntropyResult r = masked_cross_entropy(Matrix{{1000, -1000}}, l);
  EXPECT_NEAR(r.loss, 2000, 1e-9);
  EXPECT_TRUE(all_finite(r.grad_logits));
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(1);
  const Matrix logits = random_matrix(rng, 8, 5, 2.0);
  SparseLabelSet l(8, 5);
  for (std::size_t i = 0; i < 8; ++i) {
    if (i % 3 != 1) l.labels[i] = static_cast<int>(rng.uniform_index(5));
  }
  const CrossEntropyResult r = masked_cross_entropy(logits, l);
  GradientSet g;
  g.tensors.push_back(r.grad_logits);
  GradCheckOptions o;
  o.tolerance = 1e-6;
  const GradCheckReport rep =
      gradient_check(ParameterLoss([&](const std::vector<Matrix>& p) { return masked_cross_entropy(p[0], l).loss; }),
                     {logits}, g, o);
  EXPECT_TRUE(rep.passed) << rep.summary();
}

TEST(CrossEntropy, NoLabelsIsError) {
  EXPECT_THROW(masked_cross_entropy(Matrix(3, 2), SparseLabelSet(3, 2)), DataError);
}

TEST(CrossEntropy, HeadBackwardMatchesFiniteDifferences) {
  Rng rng(2);
  const HeadParams head = HeadParams::random(6, 3, rng);
  const Matrix features = random_matrix(rng, 10, 6);
  const Matrix w = random_matrix(rng, 10, 3);
  const HeadBackward hb = head_backward(head, features, w);
  auto f = [&](const std::vector<Matrix>& p) {
    const Matrix y = head_forward({p[0], p[1]}, p[2]);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y.values()[i] * w.values()[i];
    return s;
  };
  GradientSet g = hb.params;
  g.tensors.push_back(hb.grad_features);
  const GradCheckReport rep = gradient_check(ParameterLoss(f), {head.weight, head.bias, features}, g);
  EXPECT_TRUE(rep.passed) << rep.summary();
}

TEST(Pretrain, DeterministicTraces) {
  const ExperimentConfig c = small_config();
  const auto scenes = small_scenes(c, false);
  const TrainConfig cfg = make_train_config(c, Phase::kPretrain);
  TrainState a = make_pretrain_state(c), b = make_pretrain_state(c);
  const auto ta = run_phase(a, scenes, cfg);
  const auto tb = run_phase(b, scenes, cfg);
  EXPECT_EQ(ta, tb);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ta.size(), cfg.iterations);
}

TEST(Pretrain, ZeroLearningRateLeavesParameters) {
  const ExperimentConfig c = small_config();
  const auto scenes = small_scenes(c, false);
  TrainConfig cfg = make_train_config(c, Phase::kPretrain);
  cfg.lr0 = 0.0;
  TrainState s = make_pretrain_state(c);
  const EncoderParams before = s.encoder;
  Rng views_rng(3);
  const ViewPair views = draw_view_pair(views_rng, scenes[0].cloud.size(), cfg.augmentation);
  const double loss_before = vb_scene_loss(s.encoder, scenes[0], views, cfg, false).loss;
  const PreparedScene* batch[] = {&scenes[0], &scenes[1]};
  for (int i = 0; i < 3; ++i) pretrain_step(s, batch, cfg);
  EXPECT_EQ(s.encoder, before);
  EXPECT_EQ(vb_scene_loss(s.encoder, scenes[0], views, cfg, false).loss, loss_before);
  EXPECT_EQ(s.step, 3u);
}

TEST(Pretrain, SingleSceneLossHalves) {
  ExperimentConfig c = small_config();
  c.synth_points = 1024;
  c.synth_train_scenes = 1;
  c.pretrain = {200, 1, 0.01, 0.9, 0.9};
  const auto scenes = small_scenes(c, false);
  TrainState s = make_pretrain_state(c);
  const auto trace = run_phase(s, scenes, make_train_config(c, Phase::kPretrain));
  auto window_mean = [&](std::size_t from) {
    double sum = 0;
    for (std::size_t i = from; i < from + 10; ++i) sum += trace[i].loss;
    return sum / 10;
  };
  EXPECT_LT(window_mean(190), 0.5 * window_mean(0));
}

TEST(Pretrain, NonFiniteLossReportsCorrelationExtrema) {
  const ExperimentConfig c = small_config();
  auto scenes = small_scenes(c, false);
  TrainState s = make_pretrain_state(c);
  s.encoder.layers.back().weight(0, 0) = std::nan("");
  const PreparedScene* batch[] = {&scenes[0]};
  try {
    pretrain_step(s, batch, make_train_config(c, Phase::kPretrain));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("correlation min"), std::string::npos) << e.what();
  }
}

TEST(Finetune, FullyLabeledSceneIsLearned) {
  ExperimentConfig c = small_config();
  c.synth_points = 1024;
  c.synth_train_scenes = 1;
  c.labels_per_scene = 0;
  c.finetune = {300, 1, 0.01, 0.9, 0.9};
  c.finetune_augment = false;
  const auto scenes = small_scenes(c, true);
  TrainState s = make_finetune_state(make_pretrain_state(c).encoder, c);
  run_phase(s, scenes, make_train_config(c, Phase::kFinetune));
  const auto& scene = scenes[0];
  const Matrix logits = head_forward(*s.head, encoder_forward(s.encoder, scene.cloud, scene.neighbors).features);
  const std::vector<int> pred = argmax_rows(logits);
  std::size_t correct = 0, total = 0;
  for (std::size_t i : scene.labels.present_indices()) {
    correct += pred[i] == *scene.labels.labels[i];
    ++total;
  }
  EXPECT_GT(static_cast<double>(correct) / total, 0.95);
}

TEST(Finetune, UnlabeledSceneIsSkipped) {
  const ExperimentConfig c = small_config();
  auto scenes = small_scenes(c, true);
  PreparedScene blank = scenes[0];
  blank.labels = SparseLabelSet(blank.cloud.size(), c.num_classes);
  TrainState s = make_finetune_state(make_pretrain_state(c).encoder, c);
  const TrainState before = s;
  const PreparedScene* batch[] = {&blank, &blank};
  const StepResult r = finetune_step(s, batch, make_train_config(c, Phase::kFinetune));
  EXPECT_FALSE(r.updated);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_EQ(s, before);
}

TEST(Finetune, DeterministicTraces) {
  const ExperimentConfig c = small_config();
  const auto scenes = small_scenes(c, true);
  const TrainConfig cfg = make_train_config(c, Phase::kFinetune);
  TrainState a = make_finetune_state(make_pretrain_state(c).encoder, c);
  TrainState b = a;
  EXPECT_EQ(run_phase(a, scenes, cfg), run_phase(b, scenes, cfg));
  EXPECT_EQ(a, b);
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  const ExperimentConfig c = small_config();
  const auto scenes = small_scenes(c, true);
  TrainState s = make_finetune_state(make_pretrain_state(c).encoder, c);
  ExperimentConfig short_run = c;
  short_run.finetune.iterations = 3;
  run_phase(s, scenes, make_train_config(short_run, Phase::kFinetune));
  TempDir dir("ckpt");
  save_checkpoint(dir.path() / "a.vpbk", s, to_text(c));
  const Checkpoint back = load_checkpoint(dir.path() / "a.vpbk");
  EXPECT_EQ(back.state, s);
  EXPECT_EQ(back.config_text, to_text(c));
  EXPECT_EQ(serialize_checkpoint(back.state, back.config_text), serialize_checkpoint(s, to_text(c)));
}

TEST(Checkpoint, CorruptionIsDetected) {
  const ExperimentConfig c = small_config();
  const std::string bytes = serialize_checkpoint(make_pretrain_state(c), to_text(c));
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(parse_checkpoint(bad_magic), DataError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(parse_checkpoint(bad_version), DataError);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  EXPECT_THROW(parse_checkpoint(flipped), DataError);
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, bytes.size() - 7)), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.vpbk"), DataError);
}

TEST(Checkpoint, ResumeMatchesUninterruptedRun) {
  for (Phase phase : {Phase::kPretrain, Phase::kFinetune}) {
    const ExperimentConfig c = small_config();
    const auto scenes = small_scenes(c, phase == Phase::kFinetune);
    const TrainConfig cfg = make_train_config(c, phase);
    const TrainState init = phase == Phase::kPretrain ? make_pretrain_state(c)
                                                      : make_finetune_state(make_pretrain_state(c).encoder, c);
    TrainState full = init;
    std::vector<std::string> snapshots;
    const auto trace = run_phase(full, scenes, cfg, [&](const TrainState& s, const TraceRow&) {
      snapshots.push_back(serialize_checkpoint(s, to_text(c)));
    });
    for (std::size_t t : {std::size_t{0}, std::size_t{1}, std::size_t{17}, cfg.iterations - 1}) {
      TrainState resumed = parse_checkpoint(snapshots[t]).state;
      const auto tail = run_phase(resumed, scenes, cfg);
      ASSERT_EQ(tail.size(), trace.size() - t - 1);
      for (std::size_t i = 0; i < tail.size(); ++i) ASSERT_EQ(tail[i], trace[t + 1 + i]) << "resume at " << t;
      ASSERT_EQ(resumed, full);
    }
  }
}

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig c;
  EXPECT_EQ(parse_config(to_text(c)), c);
  ExperimentConfig d = small_config();
  d.phases = {Phase::kFinetune};
  d.init = "random";
  d.data_dir = "/data/scenes";
  d.squared_loss = true;
  EXPECT_EQ(parse_config(to_text(d)), d);
}

TEST(Config, ParsesValuesAndComments) {
  const ExperimentConfig c = parse_config(
      "# experiment\n"
      "seed = 9\n"
      "hidden_widths = 32, 16\n"
      "lambda = 0.005   # for wide features\n"
      "phases = finetune\n"
      "init = random\n"
      "pretrain.lr0 = 0.05\n");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.hidden_widths, (std::vector<std::size_t>{32, 16}));
  EXPECT_DOUBLE_EQ(c.lambda, 0.005);
  EXPECT_EQ(c.phases, (std::vector<Phase>{Phase::kFinetune}));
  EXPECT_DOUBLE_EQ(c.pretrain.lr0, 0.05);
}

std::string config_error(std::string_view text) {
  try {
    parse_config(text, "exp.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ConfigError for: " << text;
  return {};
}

TEST(Config, StrictErrors) {
  EXPECT_NE(config_error("seed = 1\nlearning_rate = 0.1\n").find("exp.cfg:2: unknown key 'learning_rate'"),
            std::string::npos);
  EXPECT_NE(config_error("seed = 1\nseed = 2\n").find("exp.cfg:2: duplicate key 'seed'"), std::string::npos);
  EXPECT_NE(config_error("seed 1\n").find("exp.cfg:1"), std::string::npos);
  EXPECT_NE(config_error("knn = many\n").find("knn"), std::string::npos);
  EXPECT_NE(config_error("squared_loss = maybe\n").find("squared_loss"), std::string::npos);
  config_error("pretrain.momentum = 1.0\n");
  config_error("lambda = 0\n");
  config_error("fps_count = 1\n");
  config_error("phases = pretrain, evaluate\n");
}

TEST(Config, OverridesApplyByKey) {
  ExperimentConfig c;
  apply_override(c, "finetune.iterations=12");
  apply_override(c, "hidden_widths = 8,8,8");
  EXPECT_EQ(c.finetune.iterations, 12u);
  EXPECT_EQ(c.hidden_widths.size(), 3u);
  EXPECT_THROW(apply_override(c, "nope=1"), ConfigError);
  EXPECT_THROW(apply_override(c, "seed"), ConfigError);
}

TEST(Config, FileLoading) {
  TempDir dir("cfg");
  {
    std::ofstream(dir.path() / "a.cfg") << "seed = 3\n";
  }
  EXPECT_EQ(load_config(dir.path() / "a.cfg").seed, 3u);
  EXPECT_THROW(load_config(dir.path() / "missing.cfg"), ConfigError);
}

}  // namespace
}  // namespace vbpc
