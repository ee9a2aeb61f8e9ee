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

#ifndef VBPC_VOXEL_HPP_
#define VBPC_VOXEL_HPP_

#include <cstddef>
#include <vector>

#include "vbpc/point_cloud.hpp"

namespace vbpc {

struct VoxelizedCloud {
  PointCloud cloud;
  SparseLabelSet labels;
  /// voxel_of_point[i] is the output index that original point i merged into.
  std::vector<std::size_t> voxel_of_point;
};

/// Merges points sharing a voxel of edge `voxel_size` (meters) into one
/// point at the centroid of member positions and colors. The merged label
/// is the most frequent present member label (lowest class on ties, Absent
/// if no member is labeled). Voxels are emitted in order of first
/// occurrence.
VoxelizedCloud voxel_downsample(const PointCloud& cloud, const SparseLabelSet& labels, double voxel_size);

/// Maps per-voxel predictions back to original points.
std::vector<int> project_to_points(const std::vector<int>& voxel_values,
                                   const std::vector<std::size_t>& voxel_of_point);

}  // namespace vbpc

#endif  // VBPC_VOXEL_HPP_
