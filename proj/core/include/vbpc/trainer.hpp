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

#ifndef VBPC_TRAINER_HPP_
#define VBPC_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vbpc/config.hpp"
#include "vbpc/cross_entropy.hpp"
#include "vbpc/encoder.hpp"
#include "vbpc/neighbors.hpp"
#include "vbpc/point_cloud.hpp"
#include "vbpc/random.hpp"
#include "vbpc/transform.hpp"
#include "vbpc/vb_loss.hpp"

namespace vbpc {

/// Parameters, optimizer buffers, and the generator of one training run.
struct TrainState {
  EncoderParams encoder;
  std::optional<HeadParams> head;
  /// Momentum buffers in parameters() order; empty until the first update.
  std::vector<Matrix> momentum;
  std::uint64_t step = 0;
  Rng rng;

  /// Encoder tensors, then head tensors when present.
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  std::vector<std::string> parameter_names() const;

  friend bool operator==(const TrainState&, const TrainState&) = default;
};

// Seed streams; every consumer derives its generator from the run seed.
inline constexpr std::uint64_t kStreamEncoderInit = 11;
inline constexpr std::uint64_t kStreamPretrain = 21;
inline constexpr std::uint64_t kStreamFinetune = 22;
inline constexpr std::uint64_t kStreamLabels = 31;
inline constexpr std::uint64_t kStreamHeldOut = 41;

EncoderShape encoder_shape(const ExperimentConfig& config);

/// Fresh encoder from the run seed; generator on the pretraining stream.
TrainState make_pretrain_state(const ExperimentConfig& config);
/// Starts finetuning from `encoder` with a fresh head, buffers and step.
TrainState make_finetune_state(const EncoderParams& encoder, const ExperimentConfig& config);

/// A voxelized training or evaluation scene with cached neighborhoods.
struct PreparedScene {
  std::string id;
  PointCloud cloud;       // voxel centroids
  SparseLabelSet labels;  // voxel-level supervision
  std::shared_ptr<const NeighborIndex> neighbors;
  std::vector<std::size_t> voxel_of_point;
  SparseLabelSet point_labels;  // original-resolution labels
};

/// Voxelizes and builds the kNN index. `labels_per_scene` > 0 keeps that
/// many annotated points (chosen from `label_seed`) before voxelization.
PreparedScene prepare_scene(const Scene& scene, double voxel_size, std::size_t knn,
                            std::size_t labels_per_scene = 0, std::uint64_t label_seed = 0);

std::vector<PreparedScene> prepare_scenes(const SceneSet& scenes, const ExperimentConfig& config,
                                          bool subsample_labels);

/// Augmentations and FPS start used for one pretraining sample.
struct ViewPair {
  TransformSpec first;
  TransformSpec second;
  std::size_t fps_start = 0;
};

/// Draw order: first transform, second transform, FPS start.
ViewPair draw_view_pair(Rng& rng, std::size_t num_points, const AugmentationParams& augmentation);

struct SceneLoss {
  double loss = 0.0;
  GradientSet grads;  // empty unless requested
  std::optional<CrossCorrelation> correlation;
};

/// Bottleneck loss of one scene: encode both views, gather one shared FPS
/// index set (taken on the untransformed cloud) from each, and compare.
SceneLoss vb_scene_loss(const EncoderParams& encoder, const PreparedScene& scene, const ViewPair& views,
                        const TrainConfig& cfg, bool with_gradient);

/// Masked cross-entropy of one scene under an optional augmentation.
/// Gradients cover encoder tensors followed by head tensors.
SceneLoss ce_scene_loss(const EncoderParams& encoder, const HeadParams& head, const PreparedScene& scene,
                        const TransformSpec* augmentation, bool with_gradient);

struct StepResult {
  double loss = 0.0;
  double lr = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
  bool updated = false;
};

/// One optimizer update over `batch` with gradients averaged across scenes.
/// Throws NumericError (with correlation extrema) on a non-finite loss.
StepResult pretrain_step(TrainState& state, std::span<const PreparedScene* const> batch, const TrainConfig& cfg);

/// Scenes without labeled voxels are skipped before any random draw; if the
/// whole batch is skipped the state is left untouched.
StepResult finetune_step(TrainState& state, std::span<const PreparedScene* const> batch, const TrainConfig& cfg);

struct TraceRow {
  std::uint64_t step = 0;  // 1-based update count
  double lr = 0.0;
  double loss = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using StepObserver = std::function<void(const TrainState&, const TraceRow&)>;

/// Runs updates until state.step == cfg.iterations. Each batch draws scene
/// indices from state.rng, so a run resumed from a checkpoint reproduces
/// the uninterrupted run exactly.
std::vector<TraceRow> run_phase(TrainState& state, std::span<const PreparedScene> scenes, const TrainConfig& cfg,
                                const StepObserver& observer = {});

/// Mean correlation statistics over fresh augmented view pairs of `scenes`.
CorrelationStats heldout_correlation(const EncoderParams& encoder, std::span<const PreparedScene> scenes,
                                     const TrainConfig& cfg, std::uint64_t seed);

}  // namespace vbpc

#endif  // VBPC_TRAINER_HPP_
