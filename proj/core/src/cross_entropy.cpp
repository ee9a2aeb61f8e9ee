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

#include "vbpc/cross_entropy.hpp"

#include <algorithm>
#include <cmath>

#include "vbpc/error.hpp"

namespace vbpc {

HeadParams HeadParams::initialize(std::size_t feature_dim, int num_classes) {
  if (num_classes < 1) throw ShapeError("head needs at least one class");
  return HeadParams{Matrix(feature_dim, static_cast<std::size_t>(num_classes)),
                    Matrix(1, static_cast<std::size_t>(num_classes))};
}

HeadParams HeadParams::random(std::size_t feature_dim, int num_classes, Rng& rng) {
  HeadParams head = initialize(feature_dim, num_classes);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  for (auto& w : head.weight.values()) w = rng.normal(0.0, stddev);
  for (auto& b : head.bias.values()) b = rng.normal(0.0, stddev);
  return head;
}

Matrix head_forward(const HeadParams& head, const Matrix& features) {
  if (features.cols() != head.weight.rows()) throw ShapeError("head_forward: feature width mismatch");
  Matrix logits = matmul(features, head.weight);
  add_row(logits, head.bias);
  return logits;
}

HeadBackward head_backward(const HeadParams& head, const Matrix& features, const Matrix& grad_logits) {
  if (grad_logits.rows() != features.rows() || grad_logits.cols() != head.weight.cols()) {
    throw ShapeError("head_backward: gradient shape mismatch");
  }
  HeadBackward out;
  out.params.tensors.push_back(matmul_tn(features, grad_logits));
  out.params.tensors.push_back(column_sums(grad_logits));
  out.grad_features = matmul_nt(grad_logits, head.weight);
  return out;
}

CrossEntropyResult masked_cross_entropy(const Matrix& logits, const SparseLabelSet& labels) {
  if (labels.size() != logits.rows()) throw ShapeError("masked_cross_entropy: label count differs from rows");
  if (labels.num_classes != static_cast<int>(logits.cols())) {
    throw ShapeError("masked_cross_entropy: class count differs from logit width");
  }
  CrossEntropyResult out;
  out.labeled = labels.present_count();
  if (out.labeled == 0) throw DataError("masked_cross_entropy: no labeled points");

  out.grad_logits = Matrix(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(out.labeled);
  const std::size_t s = logits.cols();
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto& label = labels.labels[i];
    if (!label) continue;
    auto row = logits.row(i);
    double shift = row[0];
    for (double v : row) shift = std::max(shift, v);
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - shift);
    const double log_norm = shift + std::log(sum);
    const auto target = static_cast<std::size_t>(*label);
    out.loss += (log_norm - row[target]) * inv;
    auto g = out.grad_logits.row(i);
    for (std::size_t c = 0; c < s; ++c) g[c] = std::exp(row[c] - log_norm) * inv;
    g[target] -= inv;
  }
  return out;
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace vbpc
