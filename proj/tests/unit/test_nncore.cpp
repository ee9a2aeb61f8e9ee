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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "test_support.hpp"
#include "vbpc/encoder.hpp"
#include "vbpc/error.hpp"
#include "vbpc/gradcheck.hpp"
#include "vbpc/gradient_audit.hpp"
#include "vbpc/matrix.hpp"
#include "vbpc/neighbors.hpp"

namespace vbpc {
namespace {

using testing::random_matrix;

std::vector<Matrix> copy_of(const std::vector<const Matrix*>& ts) {
  std::vector<Matrix> out;
  for (const Matrix* t : ts) out.push_back(*t);
  return out;
}

EncoderParams with_tensors(EncoderParams p, const std::vector<Matrix>& ts) {
  auto dst = p.tensors();
  for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] = ts[i];
  return p;
}

TEST(Matrix, ShapeRules) {
  EXPECT_THROW(Matrix(0, 3), ShapeError);
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  EXPECT_THROW((Matrix{{1, 2}, {3}}), ShapeError);
}

TEST(Matrix, ProductsAgreeWithTransposes) {
  Rng rng(1);
  const Matrix a = random_matrix(rng, 4, 3), b = random_matrix(rng, 4, 5), c = random_matrix(rng, 6, 3);
  const Matrix tn = matmul_tn(a, b), ref_tn = matmul(transpose(a), b);
  const Matrix nt = matmul_nt(a, c), ref_nt = matmul(a, transpose(c));
  for (std::size_t i = 0; i < tn.size(); ++i) EXPECT_NEAR(tn.values()[i], ref_tn.values()[i], 1e-14);
  for (std::size_t i = 0; i < nt.size(); ++i) EXPECT_NEAR(nt.values()[i], ref_nt.values()[i], 1e-14);
  EXPECT_EQ(matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{5}, {6}}), (Matrix{{17}, {39}}));
}

TEST(Matrix, GatherScatterAreAdjoint) {
  Rng rng(2);
  const Matrix a = random_matrix(rng, 6, 2);
  const std::vector<std::size_t> rows{4, 1, 4};
  const Matrix g = gather_rows(a, rows);
  EXPECT_EQ(g(0, 1), a(4, 1));
  Matrix out(6, 2);
  scatter_add_rows(g, rows, out);
  EXPECT_DOUBLE_EQ(out(4, 0), 2 * a(4, 0));
  EXPECT_DOUBLE_EQ(out(0, 0), 0.0);
}

TEST(NormalizeColumns, Examples) {
  const Matrix y = normalize_columns(Matrix{{1, 5}, {3, 5}}, 1e-8);
  EXPECT_NEAR(y(0, 0), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(y(1, 0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(y(0, 1), 0.0);
  EXPECT_EQ(y(1, 1), 0.0);
  const Matrix again = normalize_columns(y, 1e-8);
  EXPECT_NEAR(again(0, 0), y(0, 0), 1e-12);
  EXPECT_THROW(normalize_columns(Matrix(1, 3), 1e-8), ShapeError);
}

TEST(NormalizeColumns, PropertyZeroMeanUnitNorm) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = 2 + rng.uniform_index(60), d = 1 + rng.uniform_index(10);
    Matrix x = random_matrix(rng, h, d, 1.0 + 100 * rng.uniform());
    for (double& v : x.values()) v += 50 * rng.uniform();
    const Matrix y = normalize_columns(x, 1e-8);
    for (std::size_t c = 0; c < d; ++c) {
      double mean = 0, sq = 0;
      for (std::size_t r = 0; r < h; ++r) {
        mean += y(r, c);
        sq += y(r, c) * y(r, c);
      }
      ASSERT_LT(std::abs(mean / h), 1e-10);
      ASSERT_LT(std::abs(std::sqrt(sq) - 1), 1e-10);
    }
  }
}

TEST(NormalizeColumns, BackwardMatchesFiniteDifferences) {
  Rng rng(4);
  const Matrix x = random_matrix(rng, 7, 3);
  const Matrix w = random_matrix(rng, 7, 3);
  auto f = [&](const std::vector<Matrix>& p) {
    const Matrix y = normalize_columns(p[0], 1e-8);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y.values()[i] * w.values()[i];
    return s;
  };
  GradientSet g;
  g.tensors.push_back(normalize_columns_backward(normalize_columns_with_scale(x, 1e-8), w, 1e-8));
  const GradCheckReport r = gradient_check(ParameterLoss(f), {x}, g, {1e-5, 1e-7});
  EXPECT_TRUE(r.passed) << r.summary();
}

TEST(Encoder, ZeroNetworkOnSinglePoint) {
  EncoderShape shape;
  shape.hidden = {4};
  shape.output_dim = 3;
  shape.knn = 0;
  Rng rng(5);
  EncoderParams p = EncoderParams::initialize(shape, rng);
  for (Matrix* t : p.tensors()) *t *= 0.0;
  PointCloud c;
  c.positions = {{0.3, -1, 2}};
  c.colors = {{12, 200, 7}};
  const EncoderOutput out = encoder_forward(p, c);
  EXPECT_EQ(out.features, Matrix(1, 3));
}

TEST(Encoder, InitializationShapes) {
  Rng rng(6);
  const EncoderParams p = EncoderParams::initialize({{8, 5}, 3, 4}, rng);
  ASSERT_EQ(p.layers.size(), 3u);
  EXPECT_EQ(p.layers[0].weight.rows(), 6u);
  EXPECT_EQ(p.layers[1].weight.rows(), 16u);
  EXPECT_EQ(p.layers[2].weight.rows(), 10u);
  EXPECT_EQ(p.output_dim(), 3u);
  EXPECT_EQ(p.tensor_names().front(), "encoder.0.weight");
  EXPECT_EQ(p.layers[1].bias, Matrix(1, 5));
}

TEST(Encoder, KnnMustBeBelowPointCount) {
  Rng rng(7);
  const EncoderParams p = EncoderParams::initialize({{4}, 2, 5}, rng);
  EXPECT_THROW(encoder_forward(p, testing::random_cloud(rng, 5)), DataError);
}

TEST(Encoder, PermutationEquivariant) {
  Rng rng(8);
  const EncoderParams p = EncoderParams::initialize({{16, 16}, 8, 4}, rng);
  const PointCloud c = testing::random_cloud(rng, 40);
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 40; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  PointCloud pc;
  for (std::size_t i : perm) {
    pc.positions.push_back(c.positions[i]);
    pc.colors.push_back(c.colors[i]);
  }
  const Matrix a = encoder_forward(p, c).features;
  const Matrix b = encoder_forward(p, pc).features;
  for (std::size_t r = 0; r < 40; ++r) {
    for (std::size_t d = 0; d < 8; ++d) EXPECT_NEAR(b(r, d), a(perm[r], d), 1e-12);
  }
}

TEST(Encoder, Deterministic) {
  Rng rng(9);
  const EncoderParams p = EncoderParams::initialize({{16}, 8, 3}, rng);
  const PointCloud c = testing::random_cloud(rng, 30);
  EXPECT_EQ(encoder_forward(p, c).features, encoder_forward(p, c).features);
}

TEST(Encoder, ZeroUpstreamGivesZeroGradients) {
  Rng rng(10);
  const EncoderParams p = EncoderParams::initialize({{6, 6}, 4, 2}, rng);
  const PointCloud c = testing::random_cloud(rng, 12);
  const EncoderOutput out = encoder_forward(p, c);
  const GradientSet g = encoder_backward(p, out.tape, Matrix(12, 4));
  for (const Matrix& t : g.tensors) EXPECT_EQ(max_abs(t), 0.0);
  EXPECT_THROW(encoder_backward(p, out.tape, Matrix(12, 3)), ShapeError);
}

TEST(Encoder, LinearLayerGradientIsInputTransposeUpstream) {
  // No hidden layers: features = X W + b with X the 6-wide input encoding.
  Rng rng(11);
  const EncoderParams p = EncoderParams::initialize({{}, 2, 0}, rng);
  PointCloud c;
  c.positions = {{1, 2, 0}, {3, 4, 0}};
  c.colors = {{127.5, 127.5, 127.5}, {127.5, 127.5, 127.5}};
  const Matrix upstream{{1, 0}, {0, 1}};
  const GradientSet g = encoder_backward(p, encoder_forward(p, c).tape, upstream);
  // Inputs (1,2,0,0,0,0) and (3,4,0,0,0,0): dW rows x,y are [[1,3],[2,4]].
  EXPECT_DOUBLE_EQ(g.tensors[0](0, 0), 1);
  EXPECT_DOUBLE_EQ(g.tensors[0](0, 1), 3);
  EXPECT_DOUBLE_EQ(g.tensors[0](1, 0), 2);
  EXPECT_DOUBLE_EQ(g.tensors[0](1, 1), 4);
  for (std::size_t r = 2; r < 6; ++r) EXPECT_DOUBLE_EQ(g.tensors[0](r, 0), 0);
  EXPECT_EQ(g.tensors[1], (Matrix{{1, 1}}));
}

TEST(Encoder, BackwardMatchesFiniteDifferences) {
  Rng rng(12);
  const EncoderParams p = EncoderParams::initialize({{8, 8}, 5, 3}, rng);
  const PointCloud c = testing::random_cloud(rng, 20);
  auto nb = std::make_shared<const NeighborIndex>(build_neighbor_index(c, 3));
  const Matrix w = random_matrix(rng, 20, 5);
  auto f = [&](const std::vector<Matrix>& ts) {
    const Matrix y = encoder_forward(with_tensors(p, ts), c, nb).features;
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y.values()[i] * w.values()[i];
    return s;
  };
  const GradientSet g = encoder_backward(p, encoder_forward(p, c, nb).tape, w);
  GradCheckOptions o;
  o.tolerance = 1e-6;
  const GradCheckReport r = gradient_check(ParameterLoss(f), copy_of(p.tensors()), g, o);
  EXPECT_TRUE(r.passed) << r.summary();
}

TEST(GradCheck, QuadraticIsNearlyExact) {
  Rng rng(13);
  const Matrix w = random_matrix(rng, 5, 4);
  auto f = [](const std::vector<Matrix>& p) { return 0.5 * std::pow(frobenius_norm(p[0]), 2); };
  GradientSet g;
  g.tensors.push_back(w);
  const GradCheckReport r = gradient_check(ParameterLoss(f), {w}, g, {1e-5, 1e-7});
  EXPECT_TRUE(r.passed) << r.summary();
  EXPECT_EQ(r.checked, 20u);
}

TEST(GradCheck, CorruptedGradientFails) {
  Rng rng(14);
  const Matrix w = random_matrix(rng, 5, 4);
  auto f = [](const std::vector<Matrix>& p) { return 0.5 * std::pow(frobenius_norm(p[0]), 2); };
  GradientSet g;
  g.tensors.push_back(w);
  g.tensors[0](2, 3) *= 2;
  const GradCheckReport r = gradient_check(ParameterLoss(f), {w}, g);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.worst_index, 2u * 4 + 3);
}

TEST(GradCheck, SamplesAtMostRequestedCoordinates) {
  const Matrix w(30, 30, 1.0);
  auto f = [](const std::vector<Matrix>& p) { return 0.5 * std::pow(frobenius_norm(p[0]), 2); };
  GradientSet g;
  g.tensors.push_back(w);
  EXPECT_EQ(gradient_check(ParameterLoss(f), {w}, g).checked, 200u);
}

TEST(GradCheck, NonFiniteLossIsNumericError) {
  auto f = [](const std::vector<Matrix>&) { return std::nan(""); };
  GradientSet g;
  g.tensors.push_back(Matrix(1, 1));
  EXPECT_THROW(gradient_check(ParameterLoss(f), {Matrix(1, 1)}, g), NumericError);
}

TEST(GradCheck, BranchChangeShrinksStep) {
  // |x| around x = 1e-4: a step of 1e-3 crosses the kink at 0.
  auto f = [](const std::vector<Matrix>& p) {
    const double x = p[0](0, 0);
    return LossSample{std::abs(x), x > 0 ? 1u : 0u};
  };
  GradientSet g;
  g.tensors.push_back(Matrix{{1.0}});
  GradCheckOptions o;
  o.step = 1e-3;
  const GradCheckReport r = gradient_check(BranchedParameterLoss(f), {Matrix{{1e-4}}}, g, o);
  EXPECT_TRUE(r.passed) << r.summary();
  EXPECT_EQ(r.refined, 1u);
}

TEST(GradCheck, StencilsAgreeOnSmoothLoss) {
  Rng rng(15);
  const Matrix w = random_matrix(rng, 3, 3);
  auto f = [](const std::vector<Matrix>& p) {
    double s = 0;
    for (double v : p[0].values()) s += std::sin(v) * std::exp(0.3 * v);
    return s;
  };
  GradientSet g;
  g.tensors.emplace_back(3, 3);
  for (std::size_t i = 0; i < 9; ++i) {
    const double v = w.values()[i];
    g.tensors[0].values()[i] = std::exp(0.3 * v) * (std::cos(v) + 0.3 * std::sin(v));
  }
  for (Stencil s : {Stencil::kTwoPoint, Stencil::kFourPoint, Stencil::kRidders}) {
    GradCheckOptions o;
    o.stencil = s;
    o.step = s == Stencil::kTwoPoint ? 1e-5 : 1e-3;
    o.tolerance = 1e-8;
    const GradCheckReport r = gradient_check(ParameterLoss(f), {w}, g, o);
    EXPECT_TRUE(r.passed) << static_cast<int>(s) << " " << r.summary();
  }
}

TEST(GradientAudit, PretrainLossAtSmallScale) {
  GradientAuditSpec spec;
  spec.points = 32;
  spec.feature_dim = 8;
  spec.fps_count = 16;
  spec.seed = 3;
  const GradCheckReport r = audit_vb_gradient(spec);
  EXPECT_TRUE(r.passed) << r.summary();
  EXPECT_EQ(r.skipped, 0u);
}

TEST(GradientAudit, SquaredVariantAndSegmentationLoss) {
  GradientAuditSpec spec;
  spec.points = 40;
  spec.feature_dim = 6;
  spec.squared_loss = true;
  spec.seed = 4;
  const GradCheckReport vb = audit_vb_gradient(spec);
  EXPECT_TRUE(vb.passed) << vb.summary();
  const GradCheckReport ce = audit_ce_gradient(spec);
  EXPECT_TRUE(ce.passed) << ce.summary();
}

}  // namespace
}  // namespace vbpc
