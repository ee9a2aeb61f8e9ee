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

#ifndef VBPC_CHECKPOINT_HPP_
#define VBPC_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "vbpc/trainer.hpp"

namespace vbpc {

inline constexpr char kCheckpointMagic[4] = {'V', 'P', 'B', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (all integers little-endian):
//   "VPBK" | u32 version
//   u64 length | config text (UTF-8)
//   u64 length | state text: "step = N", "knn = K", "rng = <engine state>"
//   u32 tensor count, then per tensor:
//     u32 name length | name | u32 rank | u64 dims[rank] | f64 values
//   u32 CRC-32 of every preceding byte
// Tensor names: encoder.<l>.weight|bias, head.weight|bias, and the same
// names under "momentum/" for optimizer buffers.

struct Checkpoint {
  std::string config_text;
  TrainState state;
};

std::string serialize_checkpoint(const TrainState& state, std::string_view config_text);
/// Throws DataError on bad magic, version mismatch, CRC failure, or
/// malformed content.
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const TrainState& state, std::string_view config_text);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vbpc

#endif  // VBPC_CHECKPOINT_HPP_
