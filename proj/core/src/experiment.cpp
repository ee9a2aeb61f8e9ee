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

#include "vbpc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "vbpc/error.hpp"
#include "vbpc/synthetic.hpp"

namespace vbpc {

Dataset load_dataset(const ExperimentConfig& config) {
  Dataset d;
  if (config.data_dir.empty()) {
    d.train = generate_synthetic_split(config.seed, config.synth_train_scenes, config.synth_points,
                                       config.num_classes, Split::kTrain);
    d.val = generate_synthetic_split(config.seed, config.synth_val_scenes, config.synth_points, config.num_classes,
                                     Split::kVal);
  } else {
    const std::filesystem::path root(config.data_dir);
    d.train = load_scene_set(root / "train", config.num_classes, Split::kTrain);
    d.val = load_scene_set(root / "val", config.num_classes, Split::kVal);
  }
  d.train.validate();
  d.val.validate();
  return d;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  write_scene_set(dir / "train", dataset.train);
  write_scene_set(dir / "val", dataset.val);
}

PreparedDataset prepare_dataset(const Dataset& dataset, const ExperimentConfig& config) {
  return {prepare_scenes(dataset.train, config, true), prepare_scenes(dataset.val, config, false)};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

PhaseOutput run_training(const ExperimentConfig& config, Phase phase, TrainState state,
                         std::span<const PreparedScene> scenes, const std::filesystem::path& checkpoint_dir,
                         std::ostream* log) {
  const TrainConfig cfg = make_train_config(config, phase);
  const std::string config_text = to_text(config);
  const std::uint64_t log_every = std::max<std::uint64_t>(1, cfg.iterations / 20);
  PhaseOutput out;
  out.trace = run_phase(state, scenes, cfg, [&](const TrainState& s, const TraceRow& row) {
    if (log && (row.step % log_every == 0 || row.step == cfg.iterations)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "[%s] step %llu/%llu lr %.5f loss %.6f\n", phase_name(phase).data(),
                    static_cast<unsigned long long>(row.step), static_cast<unsigned long long>(cfg.iterations),
                    row.lr, row.loss);
      *log << buf << std::flush;
    }
    if (!checkpoint_dir.empty() && config.checkpoint_every > 0 && row.step % config.checkpoint_every == 0) {
      save_checkpoint(checkpoint_dir / ("step_" + std::to_string(row.step) + ".vpbk"), s, config_text);
    }
  });
  out.state = std::move(state);
  return out;
}

EncoderParams resolve_finetune_init(const ExperimentConfig& config, const std::optional<EncoderParams>& pretrained) {
  if (config.init == "random") return make_pretrain_state(config).encoder;
  if (config.init == "pretrained") {
    if (!pretrained) throw ConfigError("init = pretrained requires the pretrain phase; give a checkpoint path instead");
    return *pretrained;
  }
  EncoderParams encoder = load_checkpoint(config.init).state.encoder;
  if (encoder.output_dim() != config.feature_dim) {
    throw ConfigError("checkpoint '" + config.init + "' has feature_dim " + std::to_string(encoder.output_dim()) +
                      ", config says " + std::to_string(config.feature_dim));
  }
  return encoder;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                std::ostream* log) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create '" + out_dir.string() + "': " + ec.message());
  const std::string config_text = to_text(config);

  const Dataset dataset = load_dataset(config);
  const PreparedDataset prepared = prepare_dataset(dataset, config);
  ExperimentResult result;

  std::optional<EncoderParams> pretrained;
  if (config.has_phase(Phase::kPretrain)) {
    PhaseOutput pre = run_training(config, Phase::kPretrain, make_pretrain_state(config), prepared.train, out_dir, log);
    write_text_file(out_dir / "pretrain_trace.csv", format_trace_csv(pre.trace));
    save_checkpoint(out_dir / "pretrain.vpbk", pre.state, config_text);
    result.pretrain_trace = std::move(pre.trace);
    pretrained = std::move(pre.state.encoder);
  }

  auto finetune_and_evaluate = [&](const EncoderParams& init, const std::string& prefix) {
    PhaseOutput fine = run_training(config, Phase::kFinetune, make_finetune_state(init, config), prepared.train,
                                    prefix.empty() ? out_dir : std::filesystem::path{}, log);
    RunReport report = evaluate(fine.state, prepared.val);
    report.config_text = config_text;
    report.seed = config.seed;
    report.trace = std::move(fine.trace);
    write_text_file(out_dir / (prefix + "trace.csv"), format_trace_csv(report.trace));
    write_text_file(out_dir / (prefix + "report.csv"), format_report_csv(report));
    if (prefix.empty()) save_checkpoint(out_dir / "final.vpbk", fine.state, config_text);
    return std::pair{std::move(report), std::move(fine.state)};
  };

  if (config.has_phase(Phase::kFinetune)) {
    auto [report, state] = finetune_and_evaluate(resolve_finetune_init(config, pretrained), "");
    result.report = std::move(report);
    result.final_state = std::move(state);
    if (config.compare_baseline) {
      ExperimentConfig random_init = config;
      random_init.init = "random";
      result.baseline = finetune_and_evaluate(resolve_finetune_init(random_init, std::nullopt), "baseline_").first;
    }
  } else if (pretrained) {
    TrainState state;
    state.encoder = *pretrained;
    result.final_state = std::move(state);
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::string summary = "seed = " + std::to_string(config.seed) + "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "wall_seconds = %.3f\n", wall);
  summary += buf;
  if (result.report) {
    result.report->wall_seconds = wall;
    std::snprintf(buf, sizeof(buf), "miou = %.6f\n", result.report->miou);
    summary += buf;
  }
  if (result.baseline) {
    result.baseline->wall_seconds = wall;
    std::snprintf(buf, sizeof(buf), "baseline_miou = %.6f\n", result.baseline->miou);
    summary += buf;
  }
  write_text_file(out_dir / "summary.txt", summary);
  return result;
}

}  // namespace vbpc
