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

#ifndef VBPC_SYNTHETIC_HPP_
#define VBPC_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "vbpc/point_cloud.hpp"

namespace vbpc {

struct SyntheticScene {
  PointCloud cloud;
  SparseLabelSet labels;
};

/// Desk-scale indoor stand-in: one to three axis-aligned boxes ("furniture")
/// per class resting on the z = 0 floor, with points sampled on the top and
/// side faces and split evenly between classes.
///
/// Each box has an HSV base color near its class hue plus a smooth spatial
/// texture (a sum of sinusoids in position), so color carries structure that
/// survives rigid motion. Positions are float32-representable and colors are
/// integers, which makes a PLY round trip exact. Pure function of its inputs.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, std::size_t num_points, int num_classes);

/// `count` scenes with ids scene_0000.. derived from `seed`.
SceneSet generate_synthetic_split(std::uint64_t seed, std::size_t count, std::size_t num_points,
                                  int num_classes, Split split);

/// Writes scene_<id>.ply (binary) and scene_<id>.labels into `dir`.
void write_scene_set(const std::filesystem::path& dir, const SceneSet& scenes);

/// Reads every scene_<id>.ply in `dir` (sorted by id) with its .labels file.
SceneSet load_scene_set(const std::filesystem::path& dir, int num_classes, Split split);

}  // namespace vbpc

#endif  // VBPC_SYNTHETIC_HPP_
