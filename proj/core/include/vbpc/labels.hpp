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

#ifndef VBPC_LABELS_HPP_
#define VBPC_LABELS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "vbpc/point_cloud.hpp"

namespace vbpc {

/// Reads an `<index> <class>` text file ('#' starts a comment).
///
/// Indices must be strictly increasing and classes must be < num_classes.
/// The result is sized to the largest listed index + 1; use attach_labels
/// to bind it to a cloud of known size.
SparseLabelSet load_labels(const std::filesystem::path& path, int num_classes);
SparseLabelSet parse_labels(std::string_view content, int num_classes,
                            std::string_view source = "<memory>");

/// Pads `labels` with Absent entries up to `num_points`. Throws DataError if
/// a listed index is >= num_points.
SparseLabelSet attach_labels(const SparseLabelSet& labels, std::size_t num_points);

void write_labels(const std::filesystem::path& path, const SparseLabelSet& labels);

/// Keeps exactly `k` present labels chosen uniformly without replacement.
SparseLabelSet subsample_labels(const SparseLabelSet& labels, std::size_t k, std::uint64_t seed);

}  // namespace vbpc

#endif  // VBPC_LABELS_HPP_
