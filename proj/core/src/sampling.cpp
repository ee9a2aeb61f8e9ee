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

#include "vbpc/sampling.hpp"

#include <limits>
#include <string>

#include "vbpc/error.hpp"

namespace vbpc {

SampleIndexSet farthest_point_sampling(const PointCloud& cloud, std::size_t count, std::size_t start) {
  const std::size_t m = cloud.size();
  if (count == 0 || count > m) {
    throw DataError("farthest_point_sampling: count " + std::to_string(count) + " not in [1, " +
                    std::to_string(m) + "]");
  }
  if (start >= m) throw DataError("farthest_point_sampling: start index out of range");

  std::vector<double> min_d2(m, std::numeric_limits<double>::infinity());
  std::vector<bool> selected(m, false);
  SampleIndexSet out;
  out.indices.reserve(count);

  std::size_t current = start;
  for (std::size_t t = 0;; ++t) {
    out.indices.push_back(current);
    selected[current] = true;
    if (t + 1 == count) break;
    const auto& c = cloud.positions[current];
    std::size_t best = m;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (selected[i]) continue;
      const auto& p = cloud.positions[i];
      const double dx = p[0] - c[0], dy = p[1] - c[1], dz = p[2] - c[2];
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < min_d2[i]) min_d2[i] = d2;
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    current = best;
  }
  return out;
}

}  // namespace vbpc
