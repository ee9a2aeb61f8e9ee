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

#include "vbpc/voxel.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "vbpc/error.hpp"

namespace vbpc {
namespace {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

VoxelizedCloud voxel_downsample(const PointCloud& cloud, const SparseLabelSet& labels, double voxel_size) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) throw DataError("voxel_size must be positive");
  if (labels.size() != cloud.size()) throw ShapeError("voxel_downsample: label count differs from point count");

  const std::size_t m = cloud.size();
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> voxel_ids;
  voxel_ids.reserve(m);
  VoxelizedCloud out;
  out.voxel_of_point.resize(m);
  std::vector<std::size_t> member_count;
  std::vector<std::vector<int>> label_votes;

  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = cloud.positions[i];
    const VoxelKey key{static_cast<std::int64_t>(std::floor(p[0] / voxel_size)),
                       static_cast<std::int64_t>(std::floor(p[1] / voxel_size)),
                       static_cast<std::int64_t>(std::floor(p[2] / voxel_size))};
    auto [it, inserted] = voxel_ids.try_emplace(key, out.cloud.positions.size());
    if (inserted) {
      out.cloud.positions.push_back({0, 0, 0});
      out.cloud.colors.push_back({0, 0, 0});
      member_count.push_back(0);
      label_votes.emplace_back();
    }
    const std::size_t v = it->second;
    out.voxel_of_point[i] = v;
    for (int a = 0; a < 3; ++a) {
      out.cloud.positions[v][a] += p[a];
      out.cloud.colors[v][a] += cloud.colors[i][a];
    }
    ++member_count[v];
    if (const auto& l = labels.labels[i]; l) {
      if (label_votes[v].empty()) label_votes[v].assign(static_cast<std::size_t>(labels.num_classes), 0);
      ++label_votes[v][static_cast<std::size_t>(*l)];
    }
  }

  const std::size_t n = out.cloud.positions.size();
  out.labels = SparseLabelSet(n, labels.num_classes);
  for (std::size_t v = 0; v < n; ++v) {
    const double inv = 1.0 / static_cast<double>(member_count[v]);
    for (int a = 0; a < 3; ++a) {
      out.cloud.positions[v][a] *= inv;
      out.cloud.colors[v][a] *= inv;
    }
    const auto& votes = label_votes[v];
    if (votes.empty()) continue;
    int best = 0;
    for (int c = 1; c < static_cast<int>(votes.size()); ++c) {
      if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    out.labels.labels[v] = best;
  }
  return out;
}

std::vector<int> project_to_points(const std::vector<int>& voxel_values,
                                   const std::vector<std::size_t>& voxel_of_point) {
  std::vector<int> out(voxel_of_point.size());
  for (std::size_t i = 0; i < voxel_of_point.size(); ++i) {
    if (voxel_of_point[i] >= voxel_values.size()) throw ShapeError("voxel mapping out of range");
    out[i] = voxel_values[voxel_of_point[i]];
  }
  return out;
}

}  // namespace vbpc
