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

#ifndef VBPC_POINT_CLOUD_HPP_
#define VBPC_POINT_CLOUD_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vbpc {

using Vec3 = std::array<double, 3>;

/// M points with a position in meters and an RGB color in [0, 255].
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;

  std::size_t size() const { return positions.size(); }

  /// Throws DataError unless sizes agree, M >= 1, positions are finite and
  /// colors lie in [0, 255].
  void validate() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

/// Per-point optional class id. Absent entries carry no supervision.
struct SparseLabelSet {
  std::vector<std::optional<int>> labels;
  int num_classes = 0;

  SparseLabelSet() = default;
  SparseLabelSet(std::size_t size, int classes);

  std::size_t size() const { return labels.size(); }
  std::size_t present_count() const;
  std::vector<std::size_t> present_indices() const;

  /// Throws DataError if any present label is outside [0, num_classes) or
  /// if size() != expected_size.
  void validate(std::size_t expected_size) const;

  friend bool operator==(const SparseLabelSet&, const SparseLabelSet&) = default;
};

struct Scene {
  std::string id;
  PointCloud cloud;
  SparseLabelSet labels;
};

enum class Split { kTrain, kVal };

/// Ordered scenes of one split. Scene ids are unique.
struct SceneSet {
  std::vector<Scene> scenes;
  Split split = Split::kTrain;

  void validate() const;
};

}  // namespace vbpc

#endif  // VBPC_POINT_CLOUD_HPP_
