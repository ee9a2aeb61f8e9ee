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

#ifndef VBPC_VB_LOSS_HPP_
#define VBPC_VB_LOSS_HPP_

#include "vbpc/matrix.hpp"

namespace vbpc {

struct VbConfig {
  /// Weight applied to off-diagonal correlation entries. Must be positive.
  double lambda = 1.0 / 64.0;
  /// Floor on per-column norms during normalization.
  double epsilon = 1e-8;
  /// Use ||.||_F^2 instead of ||.||_F.
  bool squared = false;

  void validate() const;
};

/// D x D cosine correlations between the columns of two views.
struct CrossCorrelation {
  Matrix z;
};

/// Normalizes both H x D views column-wise and returns zp~^T zq~. Rows of the
/// two inputs must describe the same points.
CrossCorrelation cross_correlation(const Matrix& zp, const Matrix& zq, double epsilon);

/// ||G(z) - I||_F where G scales off-diagonal entries by lambda.
double vb_loss(const CrossCorrelation& correlation, const VbConfig& cfg);

struct VbLossResult {
  double loss = 0.0;
  Matrix grad_zp;
  Matrix grad_zq;
  CrossCorrelation correlation;
};

/// Loss plus exact gradients with respect to the raw (pre-normalization)
/// views. At loss == 0 the Frobenius norm is not differentiable and the
/// gradients are zero by convention.
VbLossResult vb_loss_backward(const Matrix& zp, const Matrix& zq, const VbConfig& cfg);

struct CorrelationStats {
  double mean_diagonal = 0.0;
  double mean_abs_off_diagonal = 0.0;
  double min_entry = 0.0;
  double max_entry = 0.0;
};

CorrelationStats correlation_stats(const CrossCorrelation& correlation);

}  // namespace vbpc

#endif  // VBPC_VB_LOSS_HPP_
