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

#include "vbpc/optim.hpp"

#include <cmath>

#include "vbpc/error.hpp"

namespace vbpc {

void sgd_momentum_step(std::span<Matrix* const> params, const GradientSet& grads,
                       std::vector<Matrix>& buffers, double lr, double momentum) {
  if (grads.tensors.size() != params.size()) throw ShapeError("sgd_momentum_step: gradient count mismatch");
  if (buffers.empty()) {
    for (const Matrix* p : params) buffers.emplace_back(p->rows(), p->cols());
  }
  if (buffers.size() != params.size()) throw ShapeError("sgd_momentum_step: buffer count mismatch");
  for (std::size_t t = 0; t < params.size(); ++t) {
    require_same_shape(*params[t], grads.tensors[t], "sgd_momentum_step");
    require_same_shape(*params[t], buffers[t], "sgd_momentum_step");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t]->values();
    auto b = buffers[t].values();
    auto g = grads.tensors[t].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      b[i] = momentum * b[i] + g[i];
      p[i] -= lr * b[i];
    }
  }
}

double poly_lr(std::uint64_t step, std::uint64_t total, double lr0, double power) {
  if (total == 0 || step > total) throw ConfigError("poly_lr: step must lie in [0, total]");
  const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(total);
  return lr0 * std::pow(frac, power);
}

}  // namespace vbpc
