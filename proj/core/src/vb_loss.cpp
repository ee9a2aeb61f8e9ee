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

#include "vbpc/vb_loss.hpp"

#include <algorithm>
#include <cmath>

#include "vbpc/error.hpp"

namespace vbpc {

void VbConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

CrossCorrelation cross_correlation(const Matrix& zp, const Matrix& zq, double epsilon) {
  require_same_shape(zp, zq, "cross_correlation");
  return {matmul_tn(normalize_columns(zp, epsilon), normalize_columns(zq, epsilon))};
}

namespace {

// Gamma_lambda(z) - I
Matrix residual(const Matrix& z, double lambda) {
  Matrix r = z;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) r(i, j) = i == j ? z(i, j) - 1.0 : lambda * z(i, j);
  }
  return r;
}

}  // namespace

double vb_loss(const CrossCorrelation& correlation, const VbConfig& cfg) {
  const Matrix& z = correlation.z;
  if (z.rows() != z.cols()) throw ShapeError("vb_loss: correlation matrix must be square");
  const double norm = frobenius_norm(residual(z, cfg.lambda));
  return cfg.squared ? norm * norm : norm;
}

VbLossResult vb_loss_backward(const Matrix& zp, const Matrix& zq, const VbConfig& cfg) {
  require_same_shape(zp, zq, "vb_loss_backward");
  const ColumnNormalization np = normalize_columns_with_scale(zp, cfg.epsilon);
  const ColumnNormalization nq = normalize_columns_with_scale(zq, cfg.epsilon);

  VbLossResult out;
  out.correlation.z = matmul_tn(np.normalized, nq.normalized);
  const Matrix r = residual(out.correlation.z, cfg.lambda);
  const double norm = frobenius_norm(r);
  out.loss = cfg.squared ? norm * norm : norm;

  // dL/dz = Gamma(r) / ||r||  (or 2 Gamma(r) when squared).
  const double coeff = cfg.squared ? 2.0 : (norm > 0.0 ? 1.0 / norm : 0.0);
  Matrix g = r;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) *= coeff * (i == j ? 1.0 : cfg.lambda);
  }
  out.grad_zp = normalize_columns_backward(np, matmul_nt(nq.normalized, g), cfg.epsilon);
  out.grad_zq = normalize_columns_backward(nq, matmul(np.normalized, g), cfg.epsilon);
  return out;
}

CorrelationStats correlation_stats(const CrossCorrelation& correlation) {
  const Matrix& z = correlation.z;
  CorrelationStats s;
  s.min_entry = s.max_entry = z(0, 0);
  double off = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const double v = z(i, j);
      s.min_entry = std::min(s.min_entry, v);
      s.max_entry = std::max(s.max_entry, v);
      if (i == j) {
        s.mean_diagonal += v;
      } else {
        off += std::fabs(v);
      }
    }
  }
  const auto d = static_cast<double>(z.rows());
  s.mean_diagonal /= d;
  s.mean_abs_off_diagonal = d > 1 ? off / (d * (d - 1)) : 0.0;
  return s;
}

}  // namespace vbpc
