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

#include "vbpc/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vbpc/error.hpp"

namespace vbpc {

TransformSpec TransformSpec::identity(std::size_t num_points) {
  TransformSpec spec;
  spec.color_jitter.assign(num_points, Vec3{0.0, 0.0, 0.0});
  return spec;
}

TransformSpec sample_transform(Rng& rng, std::size_t num_points, const AugmentationParams& params) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  TransformSpec spec;
  spec.z_rotation = kTwoPi * rng.uniform();
  if (spec.z_rotation >= kTwoPi) spec.z_rotation = 0.0;
  for (auto& flag : spec.mirror) flag = rng.bernoulli(params.mirror_probability);
  spec.color_jitter.resize(num_points);
  for (auto& jitter : spec.color_jitter) {
    for (auto& v : jitter) v = rng.normal(0.0, params.color_jitter_stddev);
  }
  return spec;
}

PointCloud apply_transform(const PointCloud& cloud, const TransformSpec& spec) {
  if (spec.color_jitter.size() != cloud.size()) {
    throw ShapeError("transform jitter has " + std::to_string(spec.color_jitter.size()) +
                     " entries for a cloud of " + std::to_string(cloud.size()) + " points");
  }
  const double c = std::cos(spec.z_rotation);
  const double s = std::sin(spec.z_rotation);
  PointCloud out;
  out.positions.resize(cloud.size());
  out.colors.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    Vec3 q{c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]};
    for (int a = 0; a < 3; ++a) {
      if (spec.mirror[a]) q[a] = -q[a];
      out.colors[i][a] = std::clamp(cloud.colors[i][a] + spec.color_jitter[i][a], 0.0, 255.0);
    }
    out.positions[i] = q;
  }
  return out;
}

}  // namespace vbpc
