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

#ifndef VBPC_TRANSFORM_HPP_
#define VBPC_TRANSFORM_HPP_

#include <array>
#include <cstddef>
#include <vector>

#include "vbpc/point_cloud.hpp"
#include "vbpc/random.hpp"

namespace vbpc {

/// One draw from the augmentation distribution: rotation about +z, optional
/// per-axis mirroring, and additive per-point color noise.
struct TransformSpec {
  double z_rotation = 0.0;  // radians, [0, 2*pi)
  std::array<bool, 3> mirror{false, false, false};
  std::vector<Vec3> color_jitter;

  static TransformSpec identity(std::size_t num_points);
};

struct AugmentationParams {
  double mirror_probability = 0.5;
  double color_jitter_stddev = 255.0 * 0.05;
};

/// Draw order: angle, mirror x/y/z, then 3*num_points jitter values.
TransformSpec sample_transform(Rng& rng, std::size_t num_points, const AugmentationParams& params = {});

/// Rotates about z, then mirrors, then adds jitter with colors clamped to
/// [0, 255]. Point order is preserved.
PointCloud apply_transform(const PointCloud& cloud, const TransformSpec& spec);

}  // namespace vbpc

#endif  // VBPC_TRANSFORM_HPP_
