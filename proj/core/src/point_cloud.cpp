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

#include "vbpc/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vbpc/error.hpp"

namespace vbpc {

void PointCloud::validate() const {
  if (positions.empty()) throw DataError("point cloud is empty");
  if (positions.size() != colors.size()) {
    throw DataError("point cloud has " + std::to_string(positions.size()) +
                    " positions but " + std::to_string(colors.size()) + " colors");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(positions[i][a])) {
        throw DataError("non-finite coordinate at point " + std::to_string(i));
      }
      const double c = colors[i][a];
      if (!(c >= 0.0 && c <= 255.0)) {
        throw DataError("color out of [0, 255] at point " + std::to_string(i));
      }
    }
  }
}

SparseLabelSet::SparseLabelSet(std::size_t size, int classes)
    : labels(size), num_classes(classes) {}

std::size_t SparseLabelSet::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); }));
}

std::vector<std::size_t> SparseLabelSet::present_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) out.push_back(i);
  }
  return out;
}

void SparseLabelSet::validate(std::size_t expected_size) const {
  if (num_classes <= 0) throw DataError("label set has no classes");
  if (labels.size() != expected_size) {
    throw DataError("label set has " + std::to_string(labels.size()) +
                    " entries, cloud has " + std::to_string(expected_size) + " points");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] && (*labels[i] < 0 || *labels[i] >= num_classes)) {
      throw DataError("label " + std::to_string(*labels[i]) + " at point " + std::to_string(i) +
                      " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

void SceneSet::validate() const {
  if (scenes.empty()) throw DataError("scene set is empty");
  std::set<std::string> ids;
  for (const auto& scene : scenes) {
    if (!ids.insert(scene.id).second) throw DataError("duplicate scene id '" + scene.id + "'");
    scene.cloud.validate();
    scene.labels.validate(scene.cloud.size());
  }
}

}  // namespace vbpc
