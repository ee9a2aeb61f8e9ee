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

#ifndef VBPC_EXPERIMENT_HPP_
#define VBPC_EXPERIMENT_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vbpc/checkpoint.hpp"
#include "vbpc/config.hpp"
#include "vbpc/evaluate.hpp"
#include "vbpc/trainer.hpp"

namespace vbpc {

struct Dataset {
  SceneSet train;
  SceneSet val;
};

/// Reads <data_dir>/train and <data_dir>/val, or synthesizes both splits
/// from the run seed when data_dir is empty.
Dataset load_dataset(const ExperimentConfig& config);

/// Writes <dir>/train and <dir>/val as PLY + label files.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

/// Training scenes keep labels_per_scene annotations; validation scenes
/// keep dense ground truth.
struct PreparedDataset {
  std::vector<PreparedScene> train;
  std::vector<PreparedScene> val;
};

PreparedDataset prepare_dataset(const Dataset& dataset, const ExperimentConfig& config);

struct PhaseOutput {
  TrainState state;
  std::vector<TraceRow> trace;
};

/// Runs (or resumes, when `resume` is given) one training phase. With a
/// non-empty `checkpoint_dir` and config.checkpoint_every > 0, periodic
/// checkpoints named step_<n>.vpbk are written there.
PhaseOutput run_training(const ExperimentConfig& config, Phase phase, TrainState state,
                         std::span<const PreparedScene> scenes, const std::filesystem::path& checkpoint_dir = {},
                         std::ostream* log = nullptr);

/// Resolves config.init to an encoder: "random" draws one from the seed,
/// "pretrained" uses `pretrained` (ConfigError if absent), anything else is
/// read as a checkpoint path.
EncoderParams resolve_finetune_init(const ExperimentConfig& config, const std::optional<EncoderParams>& pretrained);

struct ExperimentResult {
  std::optional<RunReport> report;
  std::optional<RunReport> baseline;
  std::vector<TraceRow> pretrain_trace;
  std::optional<TrainState> final_state;
};

/// Executes the configured phases and writes into `out_dir`:
///   pretrain_trace.csv, pretrain.vpbk          (pretrain phase)
///   trace.csv, final.vpbk, report.csv          (finetune phase)
///   baseline_trace.csv, baseline_report.csv    (compare_baseline)
///   summary.txt                                (seed, timings, mIoU)
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                std::ostream* log = nullptr);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace vbpc

#endif  // VBPC_EXPERIMENT_HPP_
