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

#include "vbpc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vbpc/error.hpp"

namespace vbpc {

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix must be square");
  const std::size_t n = a.rows();
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * scale) throw NumericError("cholesky: matrix is not symmetric");
    }
  }
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw NumericError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

double log_det_spd(const Matrix& a) {
  const Matrix l = cholesky(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

double gaussian_entropy(const Matrix& cov) {
  const auto d = static_cast<double>(cov.rows());
  return 0.5 * (d * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_det_spd(cov));
}

Matrix sample_covariance(const Matrix& samples) {
  const std::size_t n = samples.rows(), d = samples.cols();
  if (n < 2) throw ShapeError("sample_covariance needs at least 2 samples");
  Matrix centered = samples;
  Matrix mean = column_sums(samples);
  mean *= 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered(i, j) -= mean(0, j);
  }
  Matrix cov = matmul_tn(centered, centered);
  cov *= 1.0 / static_cast<double>(n - 1);
  return cov;
}

double vb_objective_estimate(const Matrix& features_a, const std::vector<Matrix>& per_view_features,
                             double beta, double ridge) {
  if (!(beta > 1.0)) throw NumericError("vb_objective_estimate: beta must exceed 1");
  if (per_view_features.size() < 2) throw ShapeError("vb_objective_estimate: need at least 2 views");
  const std::size_t d = features_a.cols();
  const std::size_t inputs = per_view_features.front().rows();
  for (const auto& v : per_view_features) {
    if (v.rows() != inputs || v.cols() != d) throw ShapeError("vb_objective_estimate: view shapes differ");
  }
  if (per_view_features.size() < d + 1) {
    throw ShapeError("vb_objective_estimate: " + std::to_string(per_view_features.size()) +
                     " views is fewer than D + 1 = " + std::to_string(d + 1));
  }
  if (features_a.rows() < d + 1) {
    throw ShapeError("vb_objective_estimate: pooled sample count is fewer than D + 1");
  }

  auto regularized_log_det = [&](Matrix cov) {
    for (std::size_t i = 0; i < d; ++i) cov(i, i) += ridge;
    return log_det_spd(cov);
  };

  double conditional = 0.0;
  Matrix views(per_view_features.size(), d);
  for (std::size_t i = 0; i < inputs; ++i) {
    for (std::size_t v = 0; v < per_view_features.size(); ++v) {
      auto src = per_view_features[v].row(i);
      std::copy(src.begin(), src.end(), views.row(v).begin());
    }
    conditional += regularized_log_det(sample_covariance(views));
  }
  conditional /= static_cast<double>(inputs);
  const double marginal = regularized_log_det(sample_covariance(features_a));
  return conditional + (1.0 - beta) / beta * marginal;
}

}  // namespace vbpc
