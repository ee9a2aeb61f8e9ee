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

#ifndef VBPC_CROSS_ENTROPY_HPP_
#define VBPC_CROSS_ENTROPY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "vbpc/encoder.hpp"
#include "vbpc/matrix.hpp"
#include "vbpc/point_cloud.hpp"
#include "vbpc/random.hpp"

namespace vbpc {

/// Affine per-point classifier from D features to S logits.
struct HeadParams {
  Matrix weight;  // D x S
  Matrix bias;    // 1 x S

  /// All-zero weights and bias: every class starts equally likely.
  static HeadParams initialize(std::size_t feature_dim, int num_classes);
  /// Gaussian weights and bias with stddev 1/sqrt(D).
  static HeadParams random(std::size_t feature_dim, int num_classes, Rng& rng);

  int num_classes() const { return static_cast<int>(weight.cols()); }
  std::vector<Matrix*> tensors() { return {&weight, &bias}; }
  std::vector<const Matrix*> tensors() const { return {&weight, &bias}; }
  static std::vector<std::string> tensor_names() { return {"head.weight", "head.bias"}; }

  friend bool operator==(const HeadParams&, const HeadParams&) = default;
};

Matrix head_forward(const HeadParams& head, const Matrix& features);

struct HeadBackward {
  GradientSet params;  // weight, bias
  Matrix grad_features;
};

HeadBackward head_backward(const HeadParams& head, const Matrix& features, const Matrix& grad_logits);

struct CrossEntropyResult {
  double loss = 0.0;
  Matrix grad_logits;
  std::size_t labeled = 0;
};

/// Softmax negative log-likelihood averaged over labeled rows only; unlabeled
/// rows get zero gradient. Throws DataError when no row is labeled.
CrossEntropyResult masked_cross_entropy(const Matrix& logits, const SparseLabelSet& labels);

/// Index of the largest entry per row (lowest index on ties).
std::vector<int> argmax_rows(const Matrix& logits);

}  // namespace vbpc

#endif  // VBPC_CROSS_ENTROPY_HPP_
