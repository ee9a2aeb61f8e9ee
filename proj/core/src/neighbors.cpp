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

#include "vbpc/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>

#include "vbpc/error.hpp"

namespace vbpc {
namespace {

struct Cell {
  std::int64_t x, y, z;
  bool operator==(const Cell&) const = default;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::uint64_t h = static_cast<std::uint64_t>(c.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(c.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(c.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// (squared distance, index); lexicographic order gives the tie-break.
using Candidate = std::pair<double, std::size_t>;

}  // namespace

NeighborIndex build_neighbor_index(const PointCloud& cloud, std::size_t k) {
  const std::size_t m = cloud.size();
  if (k >= m) {
    throw DataError("neighborhood size k=" + std::to_string(k) + " must be smaller than M=" + std::to_string(m));
  }
  std::vector<std::size_t> flat(m * (k + 1));
  if (k == 0) {
    for (std::size_t i = 0; i < m; ++i) flat[i] = i;
    return NeighborIndex(m, k, std::move(flat));
  }

  Vec3 lo = cloud.positions[0], hi = cloud.positions[0];
  for (const auto& p : cloud.positions) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  const double cells_per_axis =
      std::max(1.0, std::ceil(std::cbrt(static_cast<double>(m) / static_cast<double>(k + 1))));
  const double cell = extent > 0.0 ? extent / cells_per_axis : 1.0;

  auto cell_of = [&](const Vec3& p) {
    return Cell{static_cast<std::int64_t>(std::floor((p[0] - lo[0]) / cell)),
                static_cast<std::int64_t>(std::floor((p[1] - lo[1]) / cell)),
                static_cast<std::int64_t>(std::floor((p[2] - lo[2]) / cell))};
  };
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
  Cell cmin{0, 0, 0}, cmax{0, 0, 0};
  for (std::size_t i = 0; i < m; ++i) {
    const Cell c = cell_of(cloud.positions[i]);
    grid[c].push_back(i);
    cmax = {std::max(cmax.x, c.x), std::max(cmax.y, c.y), std::max(cmax.z, c.z)};
  }
  const std::int64_t max_ring = std::max({cmax.x - cmin.x, cmax.y - cmin.y, cmax.z - cmin.z});

  std::priority_queue<Candidate> best;  // max-heap of the k best so far
  std::vector<Candidate> sorted;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& q = cloud.positions[i];
    const Cell home = cell_of(q);
    best = {};
    auto visit = [&](const Cell& c) {
      const auto it = grid.find(c);
      if (it == grid.end()) return;
      for (std::size_t j : it->second) {
        if (j == i) continue;
        const auto& p = cloud.positions[j];
        const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
        const Candidate cand{dx * dx + dy * dy + dz * dz, j};
        if (best.size() < k) {
          best.push(cand);
        } else if (cand < best.top()) {
          best.pop();
          best.push(cand);
        }
      }
    };
    for (std::int64_t r = 0; r <= max_ring; ++r) {
      // Visit the shell of cells at Chebyshev distance exactly r.
      for (std::int64_t dx = -r; dx <= r; ++dx) {
        for (std::int64_t dy = -r; dy <= r; ++dy) {
          const bool edge = std::abs(dx) == r || std::abs(dy) == r;
          if (edge) {
            for (std::int64_t dz = -r; dz <= r; ++dz) visit({home.x + dx, home.y + dy, home.z + dz});
          } else {
            visit({home.x + dx, home.y + dy, home.z - r});
            if (r != 0) visit({home.x + dx, home.y + dy, home.z + r});
          }
        }
      }
      // Unvisited points are at least r * cell away.
      const double bound = static_cast<double>(r) * cell;
      if (best.size() == k && best.top().first < bound * bound) break;
    }
    sorted.clear();
    while (!best.empty()) {
      sorted.push_back(best.top());
      best.pop();
    }
    std::sort(sorted.begin(), sorted.end());
    std::size_t* row = flat.data() + i * (k + 1);
    row[0] = i;
    for (std::size_t n = 0; n < k; ++n) row[n + 1] = sorted[n].second;
  }
  return NeighborIndex(m, k, std::move(flat));
}

}  // namespace vbpc
