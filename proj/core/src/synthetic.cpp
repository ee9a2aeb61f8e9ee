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

#include "vbpc/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "vbpc/error.hpp"
#include "vbpc/labels.hpp"
#include "vbpc/ply.hpp"
#include "vbpc/random.hpp"

namespace vbpc {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRoomHalfExtent = 2.0;
constexpr double kPositionNoise = 0.004;
constexpr std::size_t kMaxBoxesPerClass = 3;
constexpr double kBoxHueShift = 5.0;
constexpr double kPointColorNoise = 4.0;
constexpr Vec3 kTextureAmplitude{30.0, 0.18, 0.18};
constexpr double kMinWavenumber = 2.0;
constexpr double kMaxWavenumber = 15.0;
constexpr std::size_t kWavesPerChannel = 4;

struct Wave {
  Vec3 k;
  double phase;
};

struct Box {
  double cx, cy, half_w, half_d, height;
  Vec3 color;
  std::array<std::array<Wave, kWavesPerChannel>, 3> texture;
};

double surface_area(const Box& b) {
  return 4 * b.half_w * b.half_d + 4 * b.height * (b.half_w + b.half_d);
}

Vec3 hsv_to_rgb(double hue_deg, double sat, double val) {
  const double h = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0) / 60.0;
  const double c = val * sat;
  const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
  const double m = val - c;
  Vec3 rgb{};
  switch (static_cast<int>(h)) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  for (auto& v : rgb) v = 255.0 * (v + m);
  return rgb;
}

bool overlaps(const Box& a, const Box& b) {
  constexpr double kGap = 0.1;
  return std::fabs(a.cx - b.cx) < a.half_w + b.half_w + kGap &&
         std::fabs(a.cy - b.cy) < a.half_d + b.half_d + kGap;
}

Vec3 sample_on_box(const Box& box, Rng& rng) {
  const double w = 2 * box.half_w, d = 2 * box.half_d, h = box.height;
  // Top plus four walls, area weighted.
  const std::array<double, 5> areas = {w * d, w * h, w * h, d * h, d * h};
  double total = 0;
  for (double a : areas) total += a;
  double pick = rng.uniform() * total;
  std::size_t face = 0;
  while (face + 1 < areas.size() && pick >= areas[face]) pick -= areas[face++];
  const double u = rng.uniform(), v = rng.uniform();
  const double x0 = box.cx - box.half_w, y0 = box.cy - box.half_d;
  switch (face) {
    case 0: return {x0 + u * w, y0 + v * d, h};
    case 1: return {x0 + u * w, y0, v * h};
    case 2: return {x0 + u * w, y0 + d, v * h};
    case 3: return {x0, y0 + u * d, v * h};
    default: return {x0 + w, y0 + u * d, v * h};
  }
}

double to_float32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::string scene_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu", i);
  return buf;
}

}  // namespace

SyntheticScene generate_synthetic_scene(std::uint64_t seed, std::size_t num_points, int num_classes) {
  if (num_classes < 2 || num_points < static_cast<std::size_t>(num_classes)) {
    throw DataError("synthetic scene needs num_points >= num_classes >= 2");
  }
  Rng rng(derive_seed(seed, 0x5c3e));
  const auto classes = static_cast<std::size_t>(num_classes);
  const double hue_shift = 20.0 * (2.0 * rng.uniform() - 1.0);

  std::vector<Box> boxes;
  std::vector<std::size_t> first_box(classes + 1, 0);
  for (std::size_t c = 0; c < classes; ++c) {
    const double t = static_cast<double>(c) / static_cast<double>(classes - 1);
    const std::size_t count = 1 + rng.uniform_index(kMaxBoxesPerClass);
    const double class_hue = 360.0 * static_cast<double>(c) / static_cast<double>(classes) + hue_shift;
    for (std::size_t k = 0; k < count; ++k) {
      Box box{};
      box.height = (0.3 + 1.2 * t) * (0.8 + 0.4 * rng.uniform());
      box.half_w = 0.15 + 0.25 * rng.uniform();
      box.half_d = 0.15 + 0.25 * rng.uniform();
      for (int attempt = 0; attempt < 64; ++attempt) {
        box.cx = (kRoomHalfExtent - box.half_w) * (2.0 * rng.uniform() - 1.0);
        box.cy = (kRoomHalfExtent - box.half_d) * (2.0 * rng.uniform() - 1.0);
        if (std::none_of(boxes.begin(), boxes.end(), [&](const Box& b) { return overlaps(b, box); })) break;
      }
      box.color = {class_hue + rng.normal(0.0, kBoxHueShift), 0.3 + 0.5 * rng.uniform(), 0.45 + 0.4 * rng.uniform()};
      for (int a = 0; a < 3; ++a) {
        for (auto& wave : box.texture[a]) {
          const double theta = 2.0 * kPi * rng.uniform(), z = 2.0 * rng.uniform() - 1.0;
          const double r = std::sqrt(1.0 - z * z);
          const double k_mag = kMinWavenumber + (kMaxWavenumber - kMinWavenumber) * rng.uniform();
          wave.k = {k_mag * r * std::cos(theta), k_mag * r * std::sin(theta), k_mag * z};
          wave.phase = 2.0 * kPi * rng.uniform();
        }
      }
      boxes.push_back(box);
    }
    first_box[c + 1] = boxes.size();
  }

  SyntheticScene scene;
  scene.cloud.positions.reserve(num_points);
  scene.cloud.colors.reserve(num_points);
  scene.labels = SparseLabelSet(num_points, num_classes);
  std::size_t next = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t count = num_points / classes + (c < num_points % classes ? 1 : 0);
    std::vector<double> areas;
    double total = 0;
    for (std::size_t b = first_box[c]; b < first_box[c + 1]; ++b) total += areas.emplace_back(surface_area(boxes[b]));
    for (std::size_t i = 0; i < count; ++i, ++next) {
      double pick = rng.uniform() * total;
      std::size_t b = first_box[c];
      while (b + 1 < first_box[c + 1] && pick >= areas[b - first_box[c]]) pick -= areas[b++ - first_box[c]];
      const Box& box = boxes[b];
      Vec3 p = sample_on_box(box, rng);
      Vec3 color{};
      Vec3 hsv = box.color;
      for (int a = 0; a < 3; ++a) {
        for (const auto& wave : box.texture[a]) {
          hsv[a] += kTextureAmplitude[a] * std::sin(wave.k[0] * p[0] + wave.k[1] * p[1] + wave.k[2] * p[2] + wave.phase);
        }
      }
      const Vec3 rgb = hsv_to_rgb(hsv[0], std::clamp(hsv[1], 0.0, 1.0), std::clamp(hsv[2], 0.0, 1.0));
      for (int a = 0; a < 3; ++a) {
        color[a] = std::clamp(std::round(rgb[a] + rng.normal(0.0, kPointColorNoise)), 0.0, 255.0);
      }
      for (auto& v : p) v = to_float32(v + rng.normal(0.0, kPositionNoise));
      scene.cloud.positions.push_back(p);
      scene.cloud.colors.push_back(color);
      scene.labels.labels[next] = static_cast<int>(c);
    }
  }

  for (std::size_t i = num_points; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(scene.cloud.positions[i - 1], scene.cloud.positions[j]);
    std::swap(scene.cloud.colors[i - 1], scene.cloud.colors[j]);
    std::swap(scene.labels.labels[i - 1], scene.labels.labels[j]);
  }
  return scene;
}

SceneSet generate_synthetic_split(std::uint64_t seed, std::size_t count, std::size_t num_points,
                                  int num_classes, Split split) {
  SceneSet set;
  set.split = split;
  const std::uint64_t split_seed = derive_seed(seed, split == Split::kTrain ? 1 : 2);
  for (std::size_t i = 0; i < count; ++i) {
    auto generated = generate_synthetic_scene(derive_seed(split_seed, i), num_points, num_classes);
    set.scenes.push_back({scene_id(i), std::move(generated.cloud), std::move(generated.labels)});
  }
  return set;
}

void write_scene_set(const std::filesystem::path& dir, const SceneSet& scenes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  for (const auto& scene : scenes.scenes) {
    write_ply(dir / ("scene_" + scene.id + ".ply"), scene.cloud, PlyFormat::kBinaryLittleEndian);
    write_labels(dir / ("scene_" + scene.id + ".labels"), scene.labels);
  }
}

SceneSet load_scene_set(const std::filesystem::path& dir, int num_classes, Split split) {
  if (!std::filesystem::is_directory(dir)) throw DataError("'" + dir.string() + "' is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("scene_") && name.ends_with(".ply")) {
      ids.push_back(name.substr(6, name.size() - 10));
    }
  }
  std::sort(ids.begin(), ids.end());
  SceneSet set;
  set.split = split;
  for (const auto& id : ids) {
    Scene scene;
    scene.id = id;
    scene.cloud = load_ply(dir / ("scene_" + id + ".ply"));
    const auto labels_path = dir / ("scene_" + id + ".labels");
    scene.labels = std::filesystem::exists(labels_path)
                       ? attach_labels(load_labels(labels_path, num_classes), scene.cloud.size())
                       : SparseLabelSet(scene.cloud.size(), num_classes);
    set.scenes.push_back(std::move(scene));
  }
  set.validate();
  return set;
}

}  // namespace vbpc
