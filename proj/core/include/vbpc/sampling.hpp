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

#ifndef VBPC_SAMPLING_HPP_
#define VBPC_SAMPLING_HPP_

#include <cstddef>
#include <vector>

#include "vbpc/point_cloud.hpp"

namespace vbpc {

/// H distinct point indices in selection order.
struct SampleIndexSet {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  friend bool operator==(const SampleIndexSet&, const SampleIndexSet&) = default;
};

/// Greedy farthest point sampling on positions.
///
/// Starts at `start`, then repeatedly takes the unselected point whose
/// minimum Euclidean distance to the selected set is largest, breaking ties
/// by the lowest index. Runs in O(count * M).
SampleIndexSet farthest_point_sampling(const PointCloud& cloud, std::size_t count, std::size_t start);

}  // namespace vbpc

#endif  // VBPC_SAMPLING_HPP_
