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

#include "vbpc/evaluate.hpp"

#include <cstdio>

#include "vbpc/error.hpp"
#include "vbpc/voxel.hpp"

namespace vbpc {

std::vector<int> predict_points(const TrainState& state, const PreparedScene& scene) {
  if (!state.head) throw DataError("cannot predict without a prediction head");
  const auto encoded = encoder_forward(state.encoder, scene.cloud, scene.neighbors);
  return project_to_points(argmax_rows(head_forward(*state.head, encoded.features)), scene.voxel_of_point);
}

ConfusionMatrix scene_confusion(const TrainState& state, const PreparedScene& scene) {
  if (!state.head) throw DataError("cannot evaluate without a prediction head");
  if (state.head->num_classes() != scene.point_labels.num_classes) {
    throw DataError("model predicts " + std::to_string(state.head->num_classes()) + " classes but scene '" +
                    scene.id + "' has " + std::to_string(scene.point_labels.num_classes));
  }
  const std::vector<int> predicted = predict_points(state, scene);
  ConfusionMatrix cm(scene.point_labels.num_classes);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (const auto& truth = scene.point_labels.labels[i]; truth) cm.add(*truth, predicted[i]);
  }
  return cm;
}

RunReport evaluate(const TrainState& state, std::span<const PreparedScene> scenes) {
  if (!state.head) throw DataError("cannot evaluate without a prediction head");
  RunReport report;
  report.confusion = ConfusionMatrix(state.head->num_classes());
  for (const auto& scene : scenes) report.confusion += scene_confusion(state, scene);
  if (report.confusion.total() == 0) throw DataError("evaluation scenes carry no ground-truth labels");
  const MiouResult m = miou(report.confusion);
  report.per_class_iou = m.per_class;
  report.miou = m.mean;
  return report;
}

std::string format_report_csv(const RunReport& report) {
  std::string out = "class,iou\n";
  char buf[64];
  for (std::size_t c = 0; c < report.per_class_iou.size(); ++c) {
    out += std::to_string(c) + ",";
    if (report.per_class_iou[c]) {
      std::snprintf(buf, sizeof(buf), "%.17g", *report.per_class_iou[c]);
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof(buf), "mean,%.17g\n", report.miou);
  out += buf;
  return out;
}

std::string format_trace_csv(std::span<const TraceRow> trace) {
  std::string out = "step,lr,loss\n";
  char buf[96];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g\n", static_cast<unsigned long long>(row.step), row.lr, row.loss);
    out += buf;
  }
  return out;
}

}  // namespace vbpc
