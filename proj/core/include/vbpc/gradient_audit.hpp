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

#ifndef VBPC_GRADIENT_AUDIT_HPP_
#define VBPC_GRADIENT_AUDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vbpc/gradcheck.hpp"

namespace vbpc {

/// A small random problem on which the analytic training gradients are
/// compared against finite differences of the full forward pass.
struct GradientAuditSpec {
  std::size_t points = 64;
  std::vector<std::size_t> hidden{16, 16};
  std::size_t feature_dim = 16;
  std::size_t knn = 4;
  std::size_t fps_count = 32;
  int num_classes = 4;
  /// Fraction of points carrying a label in the segmentation audit.
  double labeled_fraction = 0.5;
  double lambda = 1.0 / 32.0;
  bool squared_loss = false;
  std::uint64_t seed = 0;
  GradCheckOptions check{1e-3, 1e-5, Stencil::kRidders, 200, 16, 0};
};

/// Bottleneck loss of one augmented view pair, through normalization and
/// the encoder.
GradCheckReport audit_vb_gradient(const GradientAuditSpec& spec);

/// Masked cross-entropy through head and encoder, with an augmented input.
GradCheckReport audit_ce_gradient(const GradientAuditSpec& spec);

}  // namespace vbpc

#endif  // VBPC_GRADIENT_AUDIT_HPP_
