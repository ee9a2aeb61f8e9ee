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

#include "vbpc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "vbpc/error.hpp"
#include "vbpc/labels.hpp"
#include "vbpc/optim.hpp"
#include "vbpc/sampling.hpp"
#include "vbpc/voxel.hpp"

namespace vbpc {

std::vector<Matrix*> TrainState::parameters() {
  auto out = encoder.tensors();
  if (head) {
    for (Matrix* t : head->tensors()) out.push_back(t);
  }
  return out;
}

std::vector<const Matrix*> TrainState::parameters() const {
  auto out = encoder.tensors();
  if (head) {
    for (const Matrix* t : std::as_const(*head).tensors()) out.push_back(t);
  }
  return out;
}

std::vector<std::string> TrainState::parameter_names() const {
  auto out = encoder.tensor_names();
  if (head) {
    for (auto& n : HeadParams::tensor_names()) out.push_back(n);
  }
  return out;
}

EncoderShape encoder_shape(const ExperimentConfig& config) {
  EncoderShape shape;
  shape.hidden = config.hidden_widths;
  shape.output_dim = config.feature_dim;
  shape.knn = config.knn;
  return shape;
}

TrainState make_pretrain_state(const ExperimentConfig& config) {
  Rng init(derive_seed(config.seed, kStreamEncoderInit));
  TrainState state;
  state.encoder = EncoderParams::initialize(encoder_shape(config), init);
  state.rng = Rng(derive_seed(config.seed, kStreamPretrain));
  return state;
}

TrainState make_finetune_state(const EncoderParams& encoder, const ExperimentConfig& config) {
  TrainState state;
  state.encoder = encoder;
  state.head = HeadParams::initialize(encoder.output_dim(), config.num_classes);
  state.rng = Rng(derive_seed(config.seed, kStreamFinetune));
  return state;
}

PreparedScene prepare_scene(const Scene& scene, double voxel_size, std::size_t knn, std::size_t labels_per_scene,
                            std::uint64_t label_seed) {
  scene.cloud.validate();
  scene.labels.validate(scene.cloud.size());
  PreparedScene out;
  out.id = scene.id;
  out.point_labels = labels_per_scene > 0 ? subsample_labels(scene.labels, labels_per_scene, label_seed) : scene.labels;
  VoxelizedCloud voxels = voxel_downsample(scene.cloud, out.point_labels, voxel_size);
  out.cloud = std::move(voxels.cloud);
  out.labels = std::move(voxels.labels);
  out.voxel_of_point = std::move(voxels.voxel_of_point);
  out.neighbors = std::make_shared<const NeighborIndex>(build_neighbor_index(out.cloud, knn));
  return out;
}

std::vector<PreparedScene> prepare_scenes(const SceneSet& scenes, const ExperimentConfig& config,
                                          bool subsample_labels) {
  const std::uint64_t label_stream = derive_seed(config.seed, kStreamLabels);
  std::vector<PreparedScene> out;
  out.reserve(scenes.scenes.size());
  for (std::size_t i = 0; i < scenes.scenes.size(); ++i) {
    out.push_back(prepare_scene(scenes.scenes[i], config.voxel_size, config.knn,
                                subsample_labels ? config.labels_per_scene : 0, derive_seed(label_stream, i)));
  }
  return out;
}

ViewPair draw_view_pair(Rng& rng, std::size_t num_points, const AugmentationParams& augmentation) {
  ViewPair views;
  views.first = sample_transform(rng, num_points, augmentation);
  views.second = sample_transform(rng, num_points, augmentation);
  views.fps_start = rng.uniform_index(num_points);
  return views;
}

SceneLoss vb_scene_loss(const EncoderParams& encoder, const PreparedScene& scene, const ViewPair& views,
                        const TrainConfig& cfg, bool with_gradient) {
  const std::size_t m = scene.cloud.size();
  if (m < 2) throw DataError("scene '" + scene.id + "' has fewer than 2 voxels");
  const auto first = encoder_forward(encoder, apply_transform(scene.cloud, views.first), scene.neighbors);
  const auto second = encoder_forward(encoder, apply_transform(scene.cloud, views.second), scene.neighbors);
  const SampleIndexSet sample = farthest_point_sampling(scene.cloud, std::min(cfg.fps_count, m), views.fps_start);
  const Matrix zp = gather_rows(first.features, sample.indices);
  const Matrix zq = gather_rows(second.features, sample.indices);

  SceneLoss out;
  if (!with_gradient) {
    out.correlation = cross_correlation(zp, zq, cfg.vb.epsilon);
    out.loss = vb_loss(*out.correlation, cfg.vb);
    return out;
  }
  VbLossResult vb = vb_loss_backward(zp, zq, cfg.vb);
  out.loss = vb.loss;
  out.correlation = std::move(vb.correlation);
  Matrix upstream(m, encoder.output_dim());
  scatter_add_rows(vb.grad_zp, sample.indices, upstream);
  out.grads = encoder_backward(encoder, first.tape, upstream);
  upstream = Matrix(m, encoder.output_dim());
  scatter_add_rows(vb.grad_zq, sample.indices, upstream);
  out.grads += encoder_backward(encoder, second.tape, upstream);
  return out;
}

SceneLoss ce_scene_loss(const EncoderParams& encoder, const HeadParams& head, const PreparedScene& scene,
                        const TransformSpec* augmentation, bool with_gradient) {
  const auto encoded = augmentation
                           ? encoder_forward(encoder, apply_transform(scene.cloud, *augmentation), scene.neighbors)
                           : encoder_forward(encoder, scene.cloud, scene.neighbors);
  const Matrix logits = head_forward(head, encoded.features);
  CrossEntropyResult ce = masked_cross_entropy(logits, scene.labels);
  SceneLoss out;
  out.loss = ce.loss;
  if (!with_gradient) return out;
  HeadBackward hb = head_backward(head, encoded.features, ce.grad_logits);
  out.grads = encoder_backward(encoder, encoded.tape, hb.grad_features);
  out.grads.append(std::move(hb.params));
  return out;
}

namespace {

void apply_update(TrainState& state, GradientSet& grads, std::size_t used, const TrainConfig& cfg, StepResult& result) {
  grads *= 1.0 / static_cast<double>(used);
  result.loss /= static_cast<double>(used);
  result.lr = poly_lr(state.step, cfg.iterations, cfg.lr0, cfg.poly_power);
  const auto params = state.parameters();
  sgd_momentum_step(params, grads, state.momentum, result.lr, cfg.momentum);
  ++state.step;
  result.updated = true;
}

[[noreturn]] void report_non_finite(const PreparedScene& scene, const SceneLoss& loss) {
  char buf[256];
  if (loss.correlation) {
    const auto s = correlation_stats(*loss.correlation);
    std::snprintf(buf, sizeof(buf),
                  "non-finite bottleneck loss on scene '%s': correlation min %.6g max %.6g mean diagonal %.6g",
                  scene.id.c_str(), s.min_entry, s.max_entry, s.mean_diagonal);
  } else {
    std::snprintf(buf, sizeof(buf), "non-finite loss on scene '%s'", scene.id.c_str());
  }
  throw NumericError(buf);
}

}  // namespace

StepResult pretrain_step(TrainState& state, std::span<const PreparedScene* const> batch, const TrainConfig& cfg) {
  if (batch.empty()) throw DataError("pretrain_step: empty batch");
  StepResult result;
  GradientSet total = GradientSet::zeros_like(std::as_const(state.encoder).tensors());
  for (const PreparedScene* scene : batch) {
    const ViewPair views = draw_view_pair(state.rng, scene->cloud.size(), cfg.augmentation);
    SceneLoss loss = vb_scene_loss(state.encoder, *scene, views, cfg, true);
    if (!std::isfinite(loss.loss)) report_non_finite(*scene, loss);
    total += loss.grads;
    result.loss += loss.loss;
    ++result.used;
  }
  apply_update(state, total, result.used, cfg, result);
  return result;
}

StepResult finetune_step(TrainState& state, std::span<const PreparedScene* const> batch, const TrainConfig& cfg) {
  if (!state.head) throw DataError("finetune_step: state has no prediction head");
  StepResult result;
  GradientSet total = GradientSet::zeros_like(std::as_const(state).parameters());
  for (const PreparedScene* scene : batch) {
    if (scene->labels.present_count() == 0) {
      ++result.skipped;
      continue;
    }
    std::optional<TransformSpec> augmentation;
    if (cfg.augment) augmentation = sample_transform(state.rng, scene->cloud.size(), cfg.augmentation);
    SceneLoss loss = ce_scene_loss(state.encoder, *state.head, *scene, augmentation ? &*augmentation : nullptr, true);
    if (!std::isfinite(loss.loss)) report_non_finite(*scene, loss);
    total += loss.grads;
    result.loss += loss.loss;
    ++result.used;
  }
  if (result.used == 0) return result;
  apply_update(state, total, result.used, cfg, result);
  return result;
}

std::vector<TraceRow> run_phase(TrainState& state, std::span<const PreparedScene> scenes, const TrainConfig& cfg,
                                const StepObserver& observer) {
  cfg.validate();
  if (scenes.empty()) throw DataError("no training scenes");
  if (cfg.phase == Phase::kFinetune &&
      std::none_of(scenes.begin(), scenes.end(), [](const PreparedScene& s) { return s.labels.present_count() > 0; })) {
    throw DataError("no training scene has labeled voxels");
  }
  std::vector<TraceRow> trace;
  std::vector<const PreparedScene*> batch(cfg.batch_size);
  while (state.step < cfg.iterations) {
    for (auto& slot : batch) slot = &scenes[state.rng.uniform_index(scenes.size())];
    const StepResult r = cfg.phase == Phase::kPretrain ? pretrain_step(state, batch, cfg) : finetune_step(state, batch, cfg);
    if (!r.updated) continue;
    trace.push_back({state.step, r.lr, r.loss});
    if (observer) observer(state, trace.back());
  }
  return trace;
}

CorrelationStats heldout_correlation(const EncoderParams& encoder, std::span<const PreparedScene> scenes,
                                     const TrainConfig& cfg, std::uint64_t seed) {
  if (scenes.empty()) throw DataError("heldout_correlation: no scenes");
  Rng rng(seed);
  CorrelationStats mean;
  mean.min_entry = std::numeric_limits<double>::infinity();
  mean.max_entry = -std::numeric_limits<double>::infinity();
  for (const auto& scene : scenes) {
    const ViewPair views = draw_view_pair(rng, scene.cloud.size(), cfg.augmentation);
    const SceneLoss loss = vb_scene_loss(encoder, scene, views, cfg, false);
    const CorrelationStats s = correlation_stats(*loss.correlation);
    mean.mean_diagonal += s.mean_diagonal;
    mean.mean_abs_off_diagonal += s.mean_abs_off_diagonal;
    mean.min_entry = std::min(mean.min_entry, s.min_entry);
    mean.max_entry = std::max(mean.max_entry, s.max_entry);
  }
  const auto n = static_cast<double>(scenes.size());
  mean.mean_diagonal /= n;
  mean.mean_abs_off_diagonal /= n;
  return mean;
}

}  // namespace vbpc
