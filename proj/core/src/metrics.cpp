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

#include "vbpc/metrics.hpp"

#include <string>

#include "vbpc/error.hpp"

namespace vbpc {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes > 0 ? num_classes : 0) *
              static_cast<std::size_t>(num_classes > 0 ? num_classes : 0)) {}

std::uint64_t ConfusionMatrix::at(int truth, int predicted) const {
  return counts_[static_cast<std::size_t>(truth) * static_cast<std::size_t>(classes_) +
                 static_cast<std::size_t>(predicted)];
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t count) {
  if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_) {
    throw DataError("confusion entry (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                    ") outside " + std::to_string(classes_) + " classes");
  }
  counts_[static_cast<std::size_t>(truth) * static_cast<std::size_t>(classes_) +
          static_cast<std::size_t>(predicted)] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw DataError("cannot merge confusion matrices of different class counts");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

MiouResult miou(const ConfusionMatrix& cm) {
  const int s = cm.num_classes();
  MiouResult out;
  out.per_class.resize(static_cast<std::size_t>(s));
  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < s; ++c) {
    std::uint64_t fp = 0, fn = 0;
    for (int k = 0; k < s; ++k) {
      if (k == c) continue;
      fn += cm.at(c, k);
      fp += cm.at(k, c);
    }
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t denom = tp + fp + fn;
    if (denom == 0) continue;
    const double iou = static_cast<double>(tp) / static_cast<double>(denom);
    out.per_class[static_cast<std::size_t>(c)] = iou;
    sum += iou;
    ++included;
  }
  if (included == 0) throw DataError("mIoU undefined: no class appears in ground truth or predictions");
  out.mean = sum / included;
  return out;
}

}  // namespace vbpc
