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

#include "vbpc/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "vbpc/error.hpp"

namespace vbpc {

EncoderParams EncoderParams::initialize(const EncoderShape& shape, Rng& rng) {
  if (shape.output_dim == 0) throw ShapeError("encoder output dimension must be positive");
  EncoderParams params;
  params.knn = shape.knn;
  std::size_t in = kEncoderInputDim;
  auto add_layer = [&](std::size_t out) {
    DenseLayer layer{Matrix(in, out), Matrix(1, out)};
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& w : layer.weight.values()) w = rng.normal(0.0, stddev);
    params.layers.push_back(std::move(layer));
  };
  for (std::size_t width : shape.hidden) {
    if (width == 0) throw ShapeError("hidden width must be positive");
    add_layer(width);
    in = 2 * width;
  }
  add_layer(shape.output_dim);
  return params;
}

EncoderShape EncoderParams::shape() const {
  EncoderShape s;
  s.hidden.clear();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) s.hidden.push_back(layers[l].weight.cols());
  s.output_dim = output_dim();
  s.knn = knn;
  return s;
}

void EncoderParams::validate() const {
  if (layers.empty()) throw ShapeError("encoder has no layers");
  std::size_t in = kEncoderInputDim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() != in) {
      throw ShapeError("encoder layer " + std::to_string(l) + " expects " + std::to_string(in) +
                       " inputs, weight has " + std::to_string(layer.weight.rows()) + " rows");
    }
    if (layer.bias.rows() != 1 || layer.bias.cols() != layer.weight.cols()) {
      throw ShapeError("encoder layer " + std::to_string(l) + " bias shape mismatch");
    }
    in = 2 * layer.weight.cols();
  }
}

std::vector<Matrix*> EncoderParams::tensors() {
  std::vector<Matrix*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Matrix*> EncoderParams::tensors() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<std::string> EncoderParams::tensor_names() const {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out.push_back("encoder." + std::to_string(l) + ".weight");
    out.push_back("encoder." + std::to_string(l) + ".bias");
  }
  return out;
}

GradientSet GradientSet::zeros_like(const std::vector<const Matrix*>& params) {
  GradientSet g;
  for (const Matrix* p : params) g.tensors.emplace_back(p->rows(), p->cols());
  return g;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (other.tensors.size() != tensors.size()) throw ShapeError("gradient sets differ in tensor count");
  for (std::size_t i = 0; i < tensors.size(); ++i) tensors[i] += other.tensors[i];
  return *this;
}

GradientSet& GradientSet::operator*=(double s) {
  for (auto& t : tensors) t *= s;
  return *this;
}

void GradientSet::append(GradientSet&& other) {
  for (auto& t : other.tensors) tensors.push_back(std::move(t));
}

Matrix encoder_input_features(const PointCloud& cloud) {
  Matrix x(cloud.size(), kEncoderInputDim);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto r = x.row(i);
    for (int a = 0; a < 3; ++a) {
      r[a] = cloud.positions[i][a];
      r[3 + a] = (cloud.colors[i][a] - 127.5) / kColorScale;
    }
  }
  return x;
}

Matrix neighbor_mean_pool(const Matrix& values, const NeighborIndex& neighbors) {
  if (neighbors.num_points() != values.rows()) throw ShapeError("neighbor index size differs from row count");
  Matrix out(values.rows(), values.cols());
  const double inv = 1.0 / static_cast<double>(neighbors.width());
  const std::size_t d = values.cols();
  for (std::size_t i = 0; i < values.rows(); ++i) {
    double* o = out.row(i).data();
    for (std::size_t j : neighbors.row(i)) {
      const double* v = values.row(j).data();
      for (std::size_t c = 0; c < d; ++c) o[c] += v[c];
    }
    for (std::size_t c = 0; c < d; ++c) o[c] *= inv;
  }
  return out;
}

Matrix neighbor_mean_pool_backward(const Matrix& grad_pooled, const NeighborIndex& neighbors) {
  if (neighbors.num_points() != grad_pooled.rows()) throw ShapeError("neighbor index size differs from row count");
  Matrix out(grad_pooled.rows(), grad_pooled.cols());
  const double inv = 1.0 / static_cast<double>(neighbors.width());
  const std::size_t d = grad_pooled.cols();
  for (std::size_t i = 0; i < grad_pooled.rows(); ++i) {
    const double* g = grad_pooled.row(i).data();
    for (std::size_t j : neighbors.row(i)) {
      double* o = out.row(j).data();
      for (std::size_t c = 0; c < d; ++c) o[c] += inv * g[c];
    }
  }
  return out;
}

EncoderOutput encoder_forward(const EncoderParams& params, const PointCloud& cloud,
                              std::shared_ptr<const NeighborIndex> neighbors) {
  params.validate();
  if (cloud.size() == 0) throw DataError("encoder_forward: empty cloud");
  if (!neighbors || neighbors->num_points() != cloud.size()) {
    throw ShapeError("encoder_forward: neighbor index does not match the cloud");
  }
  if (neighbors->k() != params.knn) throw ShapeError("encoder_forward: neighbor index built for a different k");

  EncoderOutput out;
  out.tape.neighbors = std::move(neighbors);
  Matrix h = encoder_input_features(cloud);
  const std::size_t m = cloud.size();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Matrix pre = matmul(h, layer.weight);
    add_row(pre, layer.bias);
    out.tape.inputs.push_back(std::move(h));
    if (l + 1 == params.layers.size()) {
      out.features = std::move(pre);
      break;
    }
    const std::size_t w = pre.cols();
    Matrix act(m, w);
    for (std::size_t i = 0; i < pre.size(); ++i) act.values()[i] = std::max(pre.values()[i], 0.0);
    const Matrix pooled = neighbor_mean_pool(act, *out.tape.neighbors);
    h = Matrix(m, 2 * w);
    for (std::size_t i = 0; i < m; ++i) {
      auto r = h.row(i);
      std::copy_n(act.row(i).data(), w, r.data());
      std::copy_n(pooled.row(i).data(), w, r.data() + w);
    }
    out.tape.pre_activations.push_back(std::move(pre));
  }
  return out;
}

EncoderOutput encoder_forward(const EncoderParams& params, const PointCloud& cloud) {
  return encoder_forward(params, cloud, std::make_shared<const NeighborIndex>(build_neighbor_index(cloud, params.knn)));
}

GradientSet encoder_backward(const EncoderParams& params, const EncoderTape& tape, const Matrix& upstream) {
  const std::size_t layers = params.layers.size();
  if (tape.inputs.size() != layers || tape.pre_activations.size() + 1 != layers || !tape.neighbors) {
    throw ShapeError("encoder_backward: tape does not match the parameters");
  }
  const std::size_t m = tape.inputs.front().rows();
  if (upstream.rows() != m || upstream.cols() != params.output_dim()) {
    throw ShapeError("encoder_backward: upstream gradient must be " + std::to_string(m) + "x" +
                     std::to_string(params.output_dim()));
  }

  GradientSet grads;
  grads.tensors.resize(2 * layers);
  Matrix g = upstream;  // gradient w.r.t. the current layer's pre-activation
  for (std::size_t l = layers; l-- > 0;) {
    const auto& layer = params.layers[l];
    grads.tensors[2 * l] = matmul_tn(tape.inputs[l], g);
    grads.tensors[2 * l + 1] = column_sums(g);
    if (l == 0) break;

    const Matrix g_input = matmul_nt(g, layer.weight);  // M x 2w
    const Matrix& pre = tape.pre_activations[l - 1];
    const std::size_t w = pre.cols();
    Matrix g_pooled(m, w);
    Matrix g_act(m, w);
    for (std::size_t i = 0; i < m; ++i) {
      auto src = g_input.row(i);
      std::copy_n(src.data(), w, g_act.row(i).data());
      std::copy_n(src.data() + w, w, g_pooled.row(i).data());
    }
    g_act += neighbor_mean_pool_backward(g_pooled, *tape.neighbors);
    for (std::size_t i = 0; i < g_act.size(); ++i) {
      if (!(pre.values()[i] > 0.0)) g_act.values()[i] = 0.0;
    }
    g = std::move(g_act);
  }
  return grads;
}

}  // namespace vbpc
