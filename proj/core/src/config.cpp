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

#include "vbpc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "vbpc/error.hpp"

namespace vbpc {

std::string_view phase_name(Phase phase) { return phase == Phase::kPretrain ? "pretrain" : "finetune"; }

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct ValueError {
  std::string what;
};

template <typename T>
T parse_number(std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ValueError{"expected a number, got '" + std::string(v) + "'"};
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ValueError{"expected true or false, got '" + std::string(v) + "'"};
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct KeySpec {
  std::string name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
KeySpec number_key(std::string name, T ExperimentConfig::*field) {
  return {std::move(name), [field](ExperimentConfig& c, std::string_view v) { c.*field = parse_number<T>(v); },
          [field](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt_double(c.*field);
            } else {
              return std::to_string(c.*field);
            }
          }};
}

KeySpec bool_key(std::string name, bool ExperimentConfig::*field) {
  return {std::move(name), [field](ExperimentConfig& c, std::string_view v) { c.*field = parse_bool(v); },
          [field](const ExperimentConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

KeySpec string_key(std::string name, std::string ExperimentConfig::*field) {
  return {std::move(name), [field](ExperimentConfig& c, std::string_view v) { c.*field = std::string(v); },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

template <typename T>
KeySpec phase_key(std::string name, PhaseSettings ExperimentConfig::*phase, T PhaseSettings::*field) {
  return {std::move(name),
          [phase, field](ExperimentConfig& c, std::string_view v) { (c.*phase).*field = parse_number<T>(v); },
          [phase, field](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt_double((c.*phase).*field);
            } else {
              return std::to_string((c.*phase).*field);
            }
          }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back(number_key("seed", &ExperimentConfig::seed));
    t.push_back(bool_key("deterministic", &ExperimentConfig::deterministic));
    t.push_back(number_key("num_classes", &ExperimentConfig::num_classes));
    t.push_back(string_key("data_dir", &ExperimentConfig::data_dir));
    t.push_back(number_key("synth.train_scenes", &ExperimentConfig::synth_train_scenes));
    t.push_back(number_key("synth.val_scenes", &ExperimentConfig::synth_val_scenes));
    t.push_back(number_key("synth.points", &ExperimentConfig::synth_points));
    t.push_back(number_key("voxel_size", &ExperimentConfig::voxel_size));
    t.push_back(number_key("labels_per_scene", &ExperimentConfig::labels_per_scene));
    t.push_back({"hidden_widths",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.hidden_widths.clear();
                   for (auto item : split_list(v)) c.hidden_widths.push_back(parse_number<std::size_t>(item));
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.hidden_widths.size(); ++i) {
                     if (i) out += ",";
                     out += std::to_string(c.hidden_widths[i]);
                   }
                   return out;
                 }});
    t.push_back(number_key("feature_dim", &ExperimentConfig::feature_dim));
    t.push_back(number_key("knn", &ExperimentConfig::knn));
    t.push_back(number_key("lambda", &ExperimentConfig::lambda));
    t.push_back(number_key("epsilon", &ExperimentConfig::epsilon));
    t.push_back(bool_key("squared_loss", &ExperimentConfig::squared_loss));
    t.push_back(number_key("fps_count", &ExperimentConfig::fps_count));
    t.push_back({"phases",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.phases.clear();
                   for (auto item : split_list(v)) {
                     if (item == "pretrain") {
                       c.phases.push_back(Phase::kPretrain);
                     } else if (item == "finetune") {
                       c.phases.push_back(Phase::kFinetune);
                     } else {
                       throw ValueError{"unknown phase '" + std::string(item) + "'"};
                     }
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.phases.size(); ++i) {
                     if (i) out += ",";
                     out += phase_name(c.phases[i]);
                   }
                   return out;
                 }});
    t.push_back(string_key("init", &ExperimentConfig::init));
    t.push_back(bool_key("compare_baseline", &ExperimentConfig::compare_baseline));
    t.push_back(bool_key("finetune.augment", &ExperimentConfig::finetune_augment));
    t.push_back(string_key("checkpoint", &ExperimentConfig::checkpoint));
    t.push_back(number_key("checkpoint_every", &ExperimentConfig::checkpoint_every));
    for (auto [prefix, phase] : {std::pair{"pretrain.", &ExperimentConfig::pretrain},
                                 std::pair{"finetune.", &ExperimentConfig::finetune}}) {
      const std::string p = prefix;
      t.push_back(phase_key(p + "iterations", phase, &PhaseSettings::iterations));
      t.push_back(phase_key(p + "batch_size", phase, &PhaseSettings::batch_size));
      t.push_back(phase_key(p + "lr0", phase, &PhaseSettings::lr0));
      t.push_back(phase_key(p + "momentum", phase, &PhaseSettings::momentum));
      t.push_back(phase_key(p + "poly_power", phase, &PhaseSettings::poly_power));
    }
    return t;
  }();
  return table;
}

void validate_phase(const PhaseSettings& p, std::string_view name) {
  const std::string n(name);
  if (p.iterations < 1) throw ConfigError(n + ".iterations must be at least 1");
  if (p.batch_size < 1) throw ConfigError(n + ".batch_size must be at least 1");
  if (!(p.lr0 > 0.0)) throw ConfigError(n + ".lr0 must be positive");
  if (!(p.momentum >= 0.0 && p.momentum < 1.0)) throw ConfigError(n + ".momentum must lie in [0, 1)");
  if (!(p.poly_power >= 0.0)) throw ConfigError(n + ".poly_power must be non-negative");
}

}  // namespace

bool ExperimentConfig::has_phase(Phase phase) const {
  return std::find(phases.begin(), phases.end(), phase) != phases.end();
}

void ExperimentConfig::validate() const {
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
  if (!(voxel_size > 0.0)) throw ConfigError("voxel_size must be positive");
  if (feature_dim < 1) throw ConfigError("feature_dim must be positive");
  for (std::size_t w : hidden_widths) {
    if (w < 1) throw ConfigError("hidden_widths entries must be positive");
  }
  if (fps_count < 2) throw ConfigError("fps_count must be at least 2");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (data_dir.empty()) {
    if (synth_train_scenes < 1 || synth_val_scenes < 1) throw ConfigError("synthetic splits must be nonempty");
    if (synth_points < static_cast<std::size_t>(num_classes)) throw ConfigError("synth.points must be >= num_classes");
  }
  validate_phase(pretrain, "pretrain");
  validate_phase(finetune, "finetune");
}

namespace {

const KeySpec& find_key(std::string_view key, const std::string& where) {
  static const std::map<std::string_view, const KeySpec*> by_name = [] {
    std::map<std::string_view, const KeySpec*> m;
    for (const auto& k : key_table()) m[k.name] = &k;
    return m;
  }();
  const auto it = by_name.find(key);
  if (it == by_name.end()) throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
  return *it->second;
}

void assign(ExperimentConfig& config, const KeySpec& spec, std::string_view value, const std::string& where) {
  try {
    spec.set(config, value);
  } catch (const ValueError& e) {
    throw ConfigError(where + ": " + spec.name + ": " + e.what);
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++line_no;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const KeySpec& spec = find_key(key, where);
    if (!seen.insert(std::string(key)).second) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    assign(config, spec, trim(line.substr(eq + 1)), where);
  }
  config.validate();
  return config;
}

void apply_override(ExperimentConfig& config, std::string_view assignment, std::string_view source) {
  const std::string where(source);
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key=value', got '" + std::string(assignment) + "'");
  const KeySpec& spec = find_key(trim(assignment.substr(0, eq)), where);
  assign(config, spec, trim(assignment.substr(eq + 1)), where);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& k : key_table()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

void TrainConfig::validate() const {
  PhaseSettings p{iterations, batch_size, lr0, momentum, poly_power};
  validate_phase(p, phase_name(phase));
  vb.validate();
  if (fps_count < 2) throw ConfigError("fps_count must be at least 2");
}

TrainConfig make_train_config(const ExperimentConfig& config, Phase phase) {
  const PhaseSettings& p = phase == Phase::kPretrain ? config.pretrain : config.finetune;
  TrainConfig t;
  t.phase = phase;
  t.iterations = p.iterations;
  t.batch_size = p.batch_size;
  t.lr0 = p.lr0;
  t.momentum = p.momentum;
  t.poly_power = p.poly_power;
  t.vb = VbConfig{config.lambda, config.epsilon, config.squared_loss};
  t.fps_count = config.fps_count;
  t.feature_dim = config.feature_dim;
  t.knn = config.knn;
  t.seed = config.seed;
  t.voxel_size = config.voxel_size;
  t.labels_per_scene = config.labels_per_scene;
  t.augment = phase == Phase::kPretrain || config.finetune_augment;
  return t;
}

}  // namespace vbpc
