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

#ifndef VBPC_NEIGHBORS_HPP_
#define VBPC_NEIGHBORS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "vbpc/point_cloud.hpp"

namespace vbpc {

/// For every point, itself followed by its k nearest other points
/// (ascending distance, ties by lowest index). Row width is k + 1.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  NeighborIndex(std::size_t num_points, std::size_t k, std::vector<std::size_t> flat)
      : num_points_(num_points), k_(k), flat_(std::move(flat)) {}

  std::size_t num_points() const { return num_points_; }
  std::size_t k() const { return k_; }
  std::size_t width() const { return k_ + 1; }

  std::span<const std::size_t> row(std::size_t i) const {
    return {flat_.data() + i * width(), width()};
  }

  friend bool operator==(const NeighborIndex&, const NeighborIndex&) = default;

 private:
  std::size_t num_points_ = 0;
  std::size_t k_ = 0;
  std::vector<std::size_t> flat_;
};

/// Exact kNN over positions using a uniform hash grid. Throws DataError if
/// k >= M.
NeighborIndex build_neighbor_index(const PointCloud& cloud, std::size_t k);

}  // namespace vbpc

#endif  // VBPC_NEIGHBORS_HPP_
