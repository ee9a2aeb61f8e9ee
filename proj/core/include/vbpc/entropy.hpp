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

#ifndef VBPC_ENTROPY_HPP_
#define VBPC_ENTROPY_HPP_

#include <vector>

#include "vbpc/matrix.hpp"

namespace vbpc {

/// Lower-triangular L with a = L L^T. Throws NumericError if `a` is not
/// symmetric positive definite.
Matrix cholesky(const Matrix& a);

double log_det_spd(const Matrix& a);

/// Differential entropy (nats) of a Gaussian with covariance `cov`:
/// 0.5 * (D ln(2 pi e) + ln det cov).
double gaussian_entropy(const Matrix& cov);

/// Unbiased covariance of the rows of `samples`.
Matrix sample_covariance(const Matrix& samples);

/// Gaussian estimate of the bottleneck objective
///
///   mean_i log|Cov_views(c_i) + r I| + (1 - beta) / beta * log|Cov(a) + r I|
///
/// `per_view_features[v]` holds the N x D features of N inputs under view v;
/// the first term averages the across-view covariance of each input, and
/// `features_a` supplies the pooled samples for the second term. r is the
/// ridge. Requires beta > 1 and at least D + 1 samples per covariance.
double vb_objective_estimate(const Matrix& features_a, const std::vector<Matrix>& per_view_features,
                             double beta, double ridge = 1e-6);

}  // namespace vbpc

#endif  // VBPC_ENTROPY_HPP_
