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

#ifndef VBPC_ENCODER_HPP_
#define VBPC_ENCODER_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "vbpc/matrix.hpp"
#include "vbpc/neighbors.hpp"
#include "vbpc/point_cloud.hpp"
#include "vbpc/random.hpp"

namespace vbpc {

// Point-feature encoder.
//
// Input per point is (x, y, z, (r - 127.5) / s, (g - 127.5) / s, (b - 127.5) / s)
// with s = kColorScale.
// Each hidden layer computes A = relu(H W + b) and hands the next layer
// [A | P A], where P averages every point with its k nearest neighbors, so
// the receptive field grows with depth. The output layer is affine only.
// Default widths are 6 -> 64 -> 64 -> D with k = 16.

struct EncoderShape {
  std::vector<std::size_t> hidden{64, 64};
  std::size_t output_dim = 32;
  std::size_t knn = 16;
};

inline constexpr std::size_t kEncoderInputDim = 6;
inline constexpr double kColorScale = 32.0;

struct DenseLayer {
  Matrix weight;  // in x out
  Matrix bias;    // 1 x out

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct EncoderParams {
  std::vector<DenseLayer> layers;
  std::size_t knn = 16;

  /// He-normal weights, zero biases.
  static EncoderParams initialize(const EncoderShape& shape, Rng& rng);

  EncoderShape shape() const;
  std::size_t output_dim() const { return layers.back().weight.cols(); }
  /// Throws ShapeError if adjacent layers do not chain.
  void validate() const;

  /// Weight, bias per layer, in order.
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::vector<std::string> tensor_names() const;

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

/// One matrix per parameter tensor, in the owner's tensor order.
struct GradientSet {
  std::vector<Matrix> tensors;

  static GradientSet zeros_like(const std::vector<const Matrix*>& params);
  GradientSet& operator+=(const GradientSet& other);
  GradientSet& operator*=(double s);
  void append(GradientSet&& other);
};

struct EncoderTape {
  std::vector<Matrix> inputs;           // input of every layer
  std::vector<Matrix> pre_activations;  // hidden layers only
  std::shared_ptr<const NeighborIndex> neighbors;
};

struct EncoderOutput {
  Matrix features;  // M x D
  EncoderTape tape;
};

Matrix encoder_input_features(const PointCloud& cloud);

/// Mean over each point's neighborhood row.
Matrix neighbor_mean_pool(const Matrix& values, const NeighborIndex& neighbors);
/// Adjoint of neighbor_mean_pool.
Matrix neighbor_mean_pool_backward(const Matrix& grad_pooled, const NeighborIndex& neighbors);

/// Uses a precomputed neighbor index, which must belong to a cloud with the
/// same point count. Rotations and mirrors preserve distances, so augmented
/// views can share the index of their source cloud.
EncoderOutput encoder_forward(const EncoderParams& params, const PointCloud& cloud,
                              std::shared_ptr<const NeighborIndex> neighbors);
/// Builds the neighbor index from `cloud` first.
EncoderOutput encoder_forward(const EncoderParams& params, const PointCloud& cloud);

/// Gradient of <upstream, features> with respect to every encoder tensor.
GradientSet encoder_backward(const EncoderParams& params, const EncoderTape& tape, const Matrix& upstream);

}  // namespace vbpc

#endif  // VBPC_ENCODER_HPP_
