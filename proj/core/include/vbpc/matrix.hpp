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

#ifndef VBPC_MATRIX_HPP_
#define VBPC_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vbpc {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  /// Both dimensions must be positive.
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix transpose(const Matrix& a);

/// 1 x cols row of column sums.
Matrix column_sums(const Matrix& a);
/// Adds a 1 x cols row to every row of `a`.
void add_row(Matrix& a, const Matrix& row);
/// y += alpha * x
void axpy(double alpha, const Matrix& x, Matrix& y);

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> rows);
/// out(rows[i], :) += a(i, :)
void scatter_add_rows(const Matrix& a, std::span<const std::size_t> rows, Matrix& out);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

/// Throws ShapeError naming `what` unless shapes agree.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

/// Column-normalized features with the per-column scale used.
struct ColumnNormalization {
  Matrix normalized;
  /// max(||centered column||, epsilon) per column.
  std::vector<double> scale;
};

/// Mean-centers each column and divides by max(column L2 norm, epsilon).
/// Requires at least 2 rows. A constant column maps to zeros.
ColumnNormalization normalize_columns_with_scale(const Matrix& features, double epsilon);
Matrix normalize_columns(const Matrix& features, double epsilon);

/// Gradient with respect to the raw features given the gradient with
/// respect to the normalized output.
Matrix normalize_columns_backward(const ColumnNormalization& forward, const Matrix& grad_normalized,
                                  double epsilon);

}  // namespace vbpc

#endif  // VBPC_MATRIX_HPP_
