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

#ifndef VBPC_GRADCHECK_HPP_
#define VBPC_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vbpc/encoder.hpp"
#include "vbpc/matrix.hpp"

namespace vbpc {

using ParameterLoss = std::function<double(const std::vector<Matrix>&)>;

/// Loss value plus a fingerprint of the piecewise branch it was evaluated
/// on (for ReLU networks, a hash of the activation pattern).
struct LossSample {
  double value = 0.0;
  std::uint64_t branch = 0;
};

using BranchedParameterLoss = std::function<LossSample(const std::vector<Matrix>&)>;

enum class Stencil {
  kTwoPoint,   // (f(x+h) - f(x-h)) / 2h
  kFourPoint,  // (8(f(x+h) - f(x-h)) - (f(x+2h) - f(x-2h))) / 12h
  kRidders,    // two-point estimates at shrinking steps, extrapolated to h -> 0
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-5;
  Stencil stencil = Stencil::kTwoPoint;
  /// Coordinates checked per tensor; smaller tensors are checked fully.
  std::size_t samples_per_tensor = 200;
  /// When the stencil straddles a branch change, the step is halved up to
  /// this many times; coordinates still straddling are skipped.
  std::size_t max_step_halvings = 12;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_tensor = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  /// Coordinates that needed a smaller step to stay on one branch.
  std::size_t refined = 0;
  /// Coordinates left out because every step straddled a branch change.
  std::size_t skipped = 0;
  bool passed = false;

  std::string summary() const;
};

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

/// Compares `analytic` against central differences
/// (f(p + h) - f(p - h)) / 2h of `loss` around `params`. Throws
/// NumericError if the loss is ever non-finite.
GradCheckReport gradient_check(const ParameterLoss& loss, const std::vector<Matrix>& params,
                               const GradientSet& analytic, const GradCheckOptions& options = {});

GradCheckReport gradient_check(const BranchedParameterLoss& loss, const std::vector<Matrix>& params,
                               const GradientSet& analytic, const GradCheckOptions& options = {});

}  // namespace vbpc

#endif  // VBPC_GRADCHECK_HPP_
