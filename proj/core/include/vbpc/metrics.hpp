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

#ifndef VBPC_METRICS_HPP_
#define VBPC_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace vbpc {

/// S x S counts; rows are ground truth, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0);

  int num_classes() const { return classes_; }
  std::uint64_t at(int truth, int predicted) const;
  void add(int truth, int predicted, std::uint64_t count = 1);
  std::uint64_t total() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct MiouResult {
  /// TP / (TP + FP + FN); empty when the denominator is zero.
  std::vector<std::optional<double>> per_class;
  /// Mean over classes with a value.
  double mean = 0.0;
};

/// Throws DataError if every class has a zero denominator.
MiouResult miou(const ConfusionMatrix& cm);

}  // namespace vbpc

#endif  // VBPC_METRICS_HPP_
