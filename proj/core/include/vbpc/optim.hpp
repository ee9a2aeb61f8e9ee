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

#ifndef VBPC_OPTIM_HPP_
#define VBPC_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vbpc/encoder.hpp"
#include "vbpc/matrix.hpp"

namespace vbpc {

/// Heavy-ball update without dampening or Nesterov:
///   buffer = momentum * buffer + grad;  param -= lr * buffer.
/// Empty `buffers` are initialized to zeros.
void sgd_momentum_step(std::span<Matrix* const> params, const GradientSet& grads,
                       std::vector<Matrix>& buffers, double lr, double momentum);

/// lr0 * (1 - step / total)^power for 0 <= step <= total.
double poly_lr(std::uint64_t step, std::uint64_t total, double lr0, double power);

}  // namespace vbpc

#endif  // VBPC_OPTIM_HPP_
