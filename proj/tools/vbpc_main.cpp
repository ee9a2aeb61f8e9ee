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

// vbpc: command-line front end.
//
//   vbpc synth     generate a synthetic dataset (train/ and val/)
//   vbpc pretrain  bottleneck pretraining, writes pretrain.vpbk
//   vbpc finetune  pointly-supervised finetuning, writes final.vpbk
//   vbpc eval      evaluate a checkpoint on the validation split
//   vbpc gradcheck finite-difference audit of the training gradients
//   vbpc run       the full experiment described by the config
//
// Exit codes: 0 ok, 1 usage or config error, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vbpc/checkpoint.hpp"
#include "vbpc/config.hpp"
#include "vbpc/error.hpp"
#include "vbpc/evaluate.hpp"
#include "vbpc/experiment.hpp"
#include "vbpc/gradient_audit.hpp"
#include "vbpc/trainer.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool deterministic = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config file (key = value)");
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_flag("--deterministic", o.deterministic, "Force determinism mode");
  cmd->add_option("--set", o.overrides, "Override a config key, e.g. --set pretrain.iterations=100");
}

vbpc::ExperimentConfig resolve_config(const CommonOptions& o) {
  vbpc::ExperimentConfig c = o.config.empty() ? vbpc::ExperimentConfig{} : vbpc::load_config(o.config);
  for (const auto& kv : o.overrides) vbpc::apply_override(c, kv, "--set");
  if (o.seed) c.seed = *o.seed;
  if (o.deterministic) c.deterministic = true;
  c.validate();
  return c;
}

fs::path prepare_out(const CommonOptions& o) {
  const fs::path out(o.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw vbpc::DataError("cannot create '" + out.string() + "': " + ec.message());
  return out;
}

vbpc::TrainState resume_or(const std::string& resume, vbpc::TrainState fresh) {
  if (resume.empty()) return fresh;
  return vbpc::load_checkpoint(resume).state;
}

int cmd_synth(const CommonOptions& o) {
  vbpc::ExperimentConfig c = resolve_config(o);
  c.data_dir.clear();
  const fs::path out = prepare_out(o);
  const vbpc::Dataset d = vbpc::load_dataset(c);
  vbpc::write_dataset(out, d);
  std::cout << "wrote " << d.train.scenes.size() << " train and " << d.val.scenes.size() << " val scenes to "
            << out.string() << "\n";
  return kOk;
}

int cmd_pretrain(const CommonOptions& o, const std::string& resume) {
  const vbpc::ExperimentConfig c = resolve_config(o);
  const fs::path out = prepare_out(o);
  const vbpc::Dataset d = vbpc::load_dataset(c);
  const auto train = vbpc::prepare_scenes(d.train, c, false);
  vbpc::PhaseOutput r = vbpc::run_training(c, vbpc::Phase::kPretrain, resume_or(resume, vbpc::make_pretrain_state(c)),
                                           train, out, &std::cerr);
  vbpc::write_text_file(out / "pretrain_trace.csv", vbpc::format_trace_csv(r.trace));
  vbpc::save_checkpoint(out / "pretrain.vpbk", r.state, vbpc::to_text(c));
  const auto val = vbpc::prepare_scenes(d.val, c, false);
  const auto stats = vbpc::heldout_correlation(r.state.encoder, val, vbpc::make_train_config(c, vbpc::Phase::kPretrain),
                                               vbpc::derive_seed(c.seed, vbpc::kStreamHeldOut));
  std::printf("held-out correlation: mean diagonal %.4f, mean |off-diagonal| %.4f\n", stats.mean_diagonal,
              stats.mean_abs_off_diagonal);
  return kOk;
}

int cmd_finetune(const CommonOptions& o, const std::string& resume) {
  const vbpc::ExperimentConfig c = resolve_config(o);
  const fs::path out = prepare_out(o);
  vbpc::TrainState state;
  if (resume.empty()) {
    std::optional<vbpc::EncoderParams> pretrained;
    if (c.init == "pretrained") {
      const fs::path ckpt = out / "pretrain.vpbk";
      if (!fs::exists(ckpt)) {
        throw vbpc::ConfigError("init = pretrained but " + ckpt.string() + " does not exist; run pretrain first");
      }
      pretrained = vbpc::load_checkpoint(ckpt).state.encoder;
    }
    state = vbpc::make_finetune_state(vbpc::resolve_finetune_init(c, pretrained), c);
  } else {
    state = vbpc::load_checkpoint(resume).state;
  }
  const vbpc::Dataset d = vbpc::load_dataset(c);
  const auto train = vbpc::prepare_scenes(d.train, c, true);
  vbpc::PhaseOutput r = vbpc::run_training(c, vbpc::Phase::kFinetune, std::move(state), train, out, &std::cerr);
  vbpc::write_text_file(out / "trace.csv", vbpc::format_trace_csv(r.trace));
  vbpc::save_checkpoint(out / "final.vpbk", r.state, vbpc::to_text(c));
  return kOk;
}

int cmd_eval(const CommonOptions& o, std::string checkpoint) {
  const vbpc::ExperimentConfig c = resolve_config(o);
  const fs::path out = prepare_out(o);
  if (checkpoint.empty()) checkpoint = c.checkpoint;
  if (checkpoint.empty()) checkpoint = (out / "final.vpbk").string();
  const vbpc::Checkpoint ckpt = vbpc::load_checkpoint(checkpoint);
  const vbpc::Dataset d = vbpc::load_dataset(c);
  const auto val = vbpc::prepare_scenes(d.val, c, false);
  vbpc::RunReport report = vbpc::evaluate(ckpt.state, val);
  report.config_text = ckpt.config_text;
  report.seed = c.seed;
  vbpc::write_text_file(out / "report.csv", vbpc::format_report_csv(report));
  std::printf("mIoU %.4f\n", report.miou);
  return kOk;
}

int cmd_gradcheck(const CommonOptions& o, std::size_t seeds, std::optional<double> step) {
  const vbpc::ExperimentConfig c = resolve_config(o);
  bool ok = true;
  for (std::size_t i = 0; i < seeds; ++i) {
    vbpc::GradientAuditSpec spec;
    spec.seed = vbpc::derive_seed(c.seed, i);
    spec.lambda = c.lambda;
    spec.squared_loss = c.squared_loss;
    if (step) spec.check.step = *step;
    const auto vb = vbpc::audit_vb_gradient(spec);
    const auto ce = vbpc::audit_ce_gradient(spec);
    std::printf("seed %zu bottleneck    %s\n", i, vb.summary().c_str());
    std::printf("seed %zu segmentation %s\n", i, ce.summary().c_str());
    ok = ok && vb.passed && ce.passed;
  }
  return ok ? kOk : kNumeric;
}

int cmd_run(const CommonOptions& o) {
  const vbpc::ExperimentConfig c = resolve_config(o);
  const vbpc::ExperimentResult r = vbpc::run_experiment(c, prepare_out(o), &std::cerr);
  if (r.report) std::printf("mIoU %.4f\n", r.report->miou);
  if (r.baseline) std::printf("baseline mIoU %.4f\n", r.baseline->miou);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viewpoint-bottleneck pretraining for pointly-supervised point cloud segmentation"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string resume;
  std::string checkpoint;
  std::size_t seeds = 20;
  std::optional<double> step;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  auto* pretrain = app.add_subcommand("pretrain", "Bottleneck pretraining");
  auto* finetune = app.add_subcommand("finetune", "Finetune with sparse labels");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient audit");
  auto* run = app.add_subcommand("run", "Full experiment");
  for (auto* cmd : {synth, pretrain, finetune, eval, gradcheck, run}) add_common(cmd, common);
  pretrain->add_option("--resume", resume, "Continue from a checkpoint");
  finetune->add_option("--resume", resume, "Continue from a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint to evaluate (default <out>/final.vpbk)");
  gradcheck->add_option("--seeds", seeds, "Number of random problems")->capture_default_str();
  gradcheck->add_option("--step", step, "Finite-difference step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(common);
    if (*pretrain) return cmd_pretrain(common, resume);
    if (*finetune) return cmd_finetune(common, resume);
    if (*eval) return cmd_eval(common, checkpoint);
    if (*gradcheck) return cmd_gradcheck(common, seeds, step);
    if (*run) return cmd_run(common);
  } catch (const vbpc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const vbpc::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const vbpc::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
