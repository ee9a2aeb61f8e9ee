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

#ifndef VBPC_CONFIG_HPP_
#define VBPC_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vbpc/transform.hpp"
#include "vbpc/vb_loss.hpp"

namespace vbpc {

enum class Phase { kPretrain, kFinetune };

std::string_view phase_name(Phase phase);

struct PhaseSettings {
  std::uint64_t iterations = 1000;
  std::size_t batch_size = 1;
  double lr0 = 0.1;
  double momentum = 0.9;
  double poly_power = 0.9;

  friend bool operator==(const PhaseSettings&, const PhaseSettings&) = default;
};

/// Everything one experiment needs. Parsed from strict `key = value` text;
/// see docs/config.md for the key list.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  bool deterministic = true;
  int num_classes = 4;

  // Data. An empty data_dir means scenes are synthesized in memory.
  std::string data_dir;
  std::size_t synth_train_scenes = 48;
  std::size_t synth_val_scenes = 16;
  std::size_t synth_points = 2048;
  double voxel_size = 0.02;
  /// Annotated points kept per training scene; 0 keeps every label.
  std::size_t labels_per_scene = 20;

  // Encoder.
  std::vector<std::size_t> hidden_widths{64, 64};
  std::size_t feature_dim = 32;
  std::size_t knn = 16;

  // Bottleneck loss.
  double lambda = 0.15;
  double epsilon = 1e-8;
  bool squared_loss = false;
  std::size_t fps_count = 256;

  std::vector<Phase> phases{Phase::kPretrain, Phase::kFinetune};
  /// Finetune initialization: "random", "pretrained", or a checkpoint path.
  std::string init = "pretrained";
  /// Also finetune from random initialization and report both.
  bool compare_baseline = false;
  bool finetune_augment = true;
  /// Checkpoint consumed by `eval`.
  std::string checkpoint;
  /// Write step_<n>.vpbk every this many updates; 0 disables.
  std::uint64_t checkpoint_every = 0;

  PhaseSettings pretrain{2000, 1, 0.05, 0.9, 0.9};
  PhaseSettings finetune{100, 4, 0.01, 0.9, 0.9};

  void validate() const;
  bool has_phase(Phase phase) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError naming the source line for unknown keys, duplicate
/// keys, and malformed values.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one `key=value` assignment on top of `config` (no validation).
void apply_override(ExperimentConfig& config, std::string_view assignment, std::string_view source = "<override>");

/// Canonical text form; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);

/// Names of every accepted key, in documentation order.
std::vector<std::string> config_keys();

/// Per-phase view consumed by the trainer.
struct TrainConfig {
  Phase phase = Phase::kPretrain;
  std::uint64_t iterations = 1000;
  std::size_t batch_size = 1;
  double lr0 = 0.1;
  double momentum = 0.9;
  double poly_power = 0.9;
  VbConfig vb;
  std::size_t fps_count = 256;
  std::size_t feature_dim = 32;
  std::size_t knn = 16;
  std::uint64_t seed = 1;
  double voxel_size = 0.02;
  std::size_t labels_per_scene = 20;
  bool augment = true;
  AugmentationParams augmentation;

  void validate() const;
};

TrainConfig make_train_config(const ExperimentConfig& config, Phase phase);

}  // namespace vbpc

#endif  // VBPC_CONFIG_HPP_
