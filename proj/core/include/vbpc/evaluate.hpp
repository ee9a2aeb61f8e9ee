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

#ifndef VBPC_EVALUATE_HPP_
#define VBPC_EVALUATE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vbpc/metrics.hpp"
#include "vbpc/trainer.hpp"

namespace vbpc {

struct RunReport {
  std::string config_text;
  std::vector<TraceRow> trace;
  std::vector<std::optional<double>> per_class_iou;
  double miou = 0.0;
  ConfusionMatrix confusion;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Predicts every voxel of `scene` and projects the argmax back to the
/// original points. Returns one class id per original point.
std::vector<int> predict_points(const TrainState& state, const PreparedScene& scene);

/// Confusion over all original points with present ground truth.
ConfusionMatrix scene_confusion(const TrainState& state, const PreparedScene& scene);

/// Accumulates confusion across scenes and computes per-class IoU and mIoU.
/// Throws DataError if the head's class count differs from the labels or
/// no scene has ground truth.
RunReport evaluate(const TrainState& state, std::span<const PreparedScene> scenes);

/// `class,iou` rows followed by `mean,<miou>`; absent classes have an
/// empty iou field.
std::string format_report_csv(const RunReport& report);
/// `step,lr,loss` rows.
std::string format_trace_csv(std::span<const TraceRow> trace);

}  // namespace vbpc

#endif  // VBPC_EVALUATE_HPP_
