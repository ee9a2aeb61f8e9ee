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

#include "vbpc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vbpc/error.hpp"

namespace vbpc {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
  data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "matrix +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: row counts differ");
  Matrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* arow = a.row(r).data();
    const double* brow = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = arow[i];
      if (ari == 0.0) continue;
      double* o = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += ari * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: column counts differ");
  Matrix out(a.rows(), b.rows());
  const std::size_t kdim = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < kdim; ++k) acc += arow[k] * brow[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

Matrix column_sums(const Matrix& a) {
  Matrix out(1, a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
  }
  return out;
}

void add_row(Matrix& a, const Matrix& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw ShapeError("add_row: shape mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += row(0, j);
  }
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
  require_same_shape(x, y, "axpy");
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] += alpha * xv[i];
}

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) throw ShapeError("gather_rows: index out of range");
    std::copy_n(a.row(rows[i]).data(), a.cols(), out.row(i).data());
  }
  return out;
}

void scatter_add_rows(const Matrix& a, std::span<const std::size_t> rows, Matrix& out) {
  if (a.rows() != rows.size() || a.cols() != out.cols()) throw ShapeError("scatter_add_rows: shape mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= out.rows()) throw ShapeError("scatter_add_rows: index out of range");
    auto dst = out.row(rows[i]);
    auto src = a.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
}

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::fabs(v));
  return m;
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

ColumnNormalization normalize_columns_with_scale(const Matrix& features, double epsilon) {
  if (features.rows() < 2) throw ShapeError("normalize_columns needs at least 2 rows");
  const std::size_t h = features.rows(), d = features.cols();
  ColumnNormalization out{features, std::vector<double>(d)};
  Matrix mean = column_sums(features);
  mean *= 1.0 / static_cast<double>(h);
  std::vector<double> sq(d, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    auto r = out.normalized.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      r[j] -= mean(0, j);
      sq[j] += r[j] * r[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) out.scale[j] = std::max(std::sqrt(sq[j]), epsilon);
  for (std::size_t i = 0; i < h; ++i) {
    auto r = out.normalized.row(i);
    for (std::size_t j = 0; j < d; ++j) r[j] /= out.scale[j];
  }
  return out;
}

Matrix normalize_columns(const Matrix& features, double epsilon) {
  return normalize_columns_with_scale(features, epsilon).normalized;
}

Matrix normalize_columns_backward(const ColumnNormalization& forward, const Matrix& grad_normalized,
                                  double epsilon) {
  const Matrix& y = forward.normalized;
  require_same_shape(y, grad_normalized, "normalize_columns_backward");
  const std::size_t h = y.rows(), d = y.cols();
  // With c = x - mean(x), n = ||c||: dy/dc = (I - y y^T) / n when n > eps,
  // and I / eps otherwise. Centering projects the result onto zero mean.
  std::vector<double> dot(d, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < d; ++j) dot[j] += y(i, j) * grad_normalized(i, j);
  }
  Matrix grad(h, d);
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const bool clamped = !(forward.scale[j] > epsilon);
      const double g = clamped ? grad_normalized(i, j) / epsilon
                               : (grad_normalized(i, j) - y(i, j) * dot[j]) / forward.scale[j];
      grad(i, j) = g;
      mean[j] += g;
    }
  }
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(h);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < d; ++j) grad(i, j) -= mean[j];
  }
  return grad;
}

}  // namespace vbpc
