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

#ifndef VBPC_PLY_HPP_
#define VBPC_PLY_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vbpc/point_cloud.hpp"

namespace vbpc {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

/// Reads the vertex element of a PLY 1.0 file.
///
/// The vertex element must declare float x/y/z (float32 or float64) and
/// uchar red/green/blue. Extra vertex properties and other elements such as
/// faces are skipped; a note for every skipped element is appended to
/// `warnings` when given. Errors throw DataError with the byte offset.
PointCloud load_ply(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Parses PLY content already in memory; `source` names it in error text.
PointCloud parse_ply(std::string_view content, std::string_view source = "<memory>",
                     std::vector<std::string>* warnings = nullptr);

/// Writes float32 positions and uchar colors (rounded and clamped).
void write_ply(const std::filesystem::path& path, const PointCloud& cloud,
               PlyFormat format = PlyFormat::kBinaryLittleEndian);
std::string format_ply(const PointCloud& cloud, PlyFormat format);

}  // namespace vbpc

#endif  // VBPC_PLY_HPP_
