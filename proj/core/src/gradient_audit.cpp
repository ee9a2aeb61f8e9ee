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

#include "vbpc/gradient_audit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "vbpc/cross_entropy.hpp"
#include "vbpc/encoder.hpp"
#include "vbpc/error.hpp"
#include "vbpc/sampling.hpp"
#include "vbpc/synthetic.hpp"
#include "vbpc/trainer.hpp"
#include "vbpc/vb_loss.hpp"

namespace vbpc {
namespace {

constexpr std::uint64_t kStreamAuditScene = 1;
constexpr std::uint64_t kStreamAuditParams = 2;
constexpr std::uint64_t kStreamAuditViews = 3;
constexpr std::uint64_t kStreamAuditLabels = 4;
constexpr std::uint64_t kStreamAuditCheck = 5;

// Extended-precision re-implementation of the forward pass. Finite
// differences of a double-precision loss bottom out near 1e-13, which is
// not enough when the relative error floor is 1e-8 and some gradients are
// structurally zero.
using Real = long double;

struct Dense {
  std::size_t rows = 0, cols = 0;
  std::vector<Real> v;

  Dense(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0L) {}
  Real& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  Real operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
};

struct Forward {
  Dense features{0, 0};
  std::uint64_t branch = 0xcbf29ce484222325ULL;  // FNV-1a over ReLU signs
};

Forward reference_encoder(const std::vector<Matrix>& tensors, const PointCloud& cloud, const NeighborIndex& nb) {
  const std::size_t m = cloud.size();
  Dense h(m, kEncoderInputDim);
  for (std::size_t i = 0; i < m; ++i) {
    for (int a = 0; a < 3; ++a) {
      h(i, a) = cloud.positions[i][a];
      h(i, 3 + a) = (static_cast<Real>(cloud.colors[i][a]) - 127.5L) / static_cast<Real>(kColorScale);
    }
  }
  Forward out;
  const std::size_t layers = tensors.size() / 2;
  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& w = tensors[2 * l];
    const Matrix& b = tensors[2 * l + 1];
    Dense pre(m, w.cols());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t o = 0; o < w.cols(); ++o) {
        Real acc = b(0, o);
        for (std::size_t k = 0; k < w.rows(); ++k) acc += h(i, k) * w(k, o);
        pre(i, o) = acc;
      }
    }
    if (l + 1 == layers) {
      out.features = std::move(pre);
      break;
    }
    const std::size_t width = w.cols();
    Dense next(m, 2 * width);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t o = 0; o < width; ++o) {
        out.branch ^= pre(i, o) > 0.0L ? 1u : 0u;
        out.branch *= 0x100000001b3ULL;
        next(i, o) = std::max(pre(i, o), 0.0L);
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t o = 0; o < width; ++o) {
        Real acc = 0.0L;
        for (std::size_t j : nb.row(i)) acc += next(j, o);
        next(i, width + o) = acc / static_cast<Real>(nb.width());
      }
    }
    h = std::move(next);
  }
  return out;
}

Dense reference_normalize(const Dense& x, const std::vector<std::size_t>& rows, Real eps) {
  Dense y(rows.size(), x.cols);
  for (std::size_t c = 0; c < x.cols; ++c) {
    Real mean = 0.0L;
    for (std::size_t i : rows) mean += x(i, c);
    mean /= static_cast<Real>(rows.size());
    Real sq = 0.0L;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      y(r, c) = x(rows[r], c) - mean;
      sq += y(r, c) * y(r, c);
    }
    const Real scale = std::max(std::sqrt(sq), eps);
    for (std::size_t r = 0; r < rows.size(); ++r) y(r, c) /= scale;
  }
  return y;
}

Real reference_vb_loss(const Dense& a, const Dense& b, const std::vector<std::size_t>& rows, const VbConfig& cfg) {
  const Dense na = reference_normalize(a, rows, cfg.epsilon);
  const Dense nb = reference_normalize(b, rows, cfg.epsilon);
  Real total = 0.0L;
  for (std::size_t i = 0; i < a.cols; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      Real z = 0.0L;
      for (std::size_t r = 0; r < rows.size(); ++r) z += na(r, i) * nb(r, j);
      const Real e = i == j ? z - 1.0L : static_cast<Real>(cfg.lambda) * z;
      total += e * e;
    }
  }
  return cfg.squared ? total : std::sqrt(total);
}

Real reference_cross_entropy(const Dense& features, const Matrix& w, const Matrix& b, const SparseLabelSet& labels) {
  Real total = 0.0L;
  std::size_t count = 0;
  std::vector<Real> logits(w.cols());
  for (std::size_t i = 0; i < features.rows; ++i) {
    if (!labels.labels[i]) continue;
    for (std::size_t c = 0; c < w.cols(); ++c) {
      Real acc = b(0, c);
      for (std::size_t k = 0; k < w.rows(); ++k) acc += features(i, k) * w(k, c);
      logits[c] = acc;
    }
    const Real top = *std::max_element(logits.begin(), logits.end());
    Real sum = 0.0L;
    for (Real l : logits) sum += std::exp(l - top);
    total += top + std::log(sum) - logits[static_cast<std::size_t>(*labels.labels[i])];
    ++count;
  }
  return total / static_cast<Real>(count);
}

struct AuditProblem {
  PreparedScene scene;
  EncoderParams encoder;
  HeadParams head;
};

AuditProblem make_problem(const GradientAuditSpec& spec) {
  if (spec.points < 2 || spec.fps_count < 2 || spec.fps_count > spec.points) {
    throw ConfigError("gradient audit: need 2 <= fps_count <= points");
  }
  SyntheticScene synth = generate_synthetic_scene(derive_seed(spec.seed, kStreamAuditScene), spec.points,
                                                  spec.num_classes);
  AuditProblem p;
  p.scene.id = "audit";
  p.scene.cloud = std::move(synth.cloud);
  p.scene.labels = SparseLabelSet(spec.points, spec.num_classes);
  Rng label_rng(derive_seed(spec.seed, kStreamAuditLabels));
  bool any = false;
  for (std::size_t i = 0; i < spec.points; ++i) {
    if (label_rng.bernoulli(spec.labeled_fraction)) {
      p.scene.labels.labels[i] = synth.labels.labels[i];
      any = any || synth.labels.labels[i].has_value();
    }
  }
  if (!any) p.scene.labels.labels[0] = synth.labels.labels[0].value_or(0);
  p.scene.neighbors = std::make_shared<const NeighborIndex>(build_neighbor_index(p.scene.cloud, spec.knn));

  EncoderShape shape;
  shape.hidden = spec.hidden;
  shape.output_dim = spec.feature_dim;
  shape.knn = spec.knn;
  Rng init(derive_seed(spec.seed, kStreamAuditParams));
  p.encoder = EncoderParams::initialize(shape, init);
  p.head = HeadParams::random(spec.feature_dim, spec.num_classes, init);
  return p;
}

std::vector<Matrix> copy_tensors(std::vector<const Matrix*> src) {
  std::vector<Matrix> out;
  out.reserve(src.size());
  for (const Matrix* m : src) out.push_back(*m);
  return out;
}

GradCheckOptions seeded(const GradientAuditSpec& spec) {
  GradCheckOptions o = spec.check;
  o.seed = derive_seed(spec.seed, kStreamAuditCheck);
  return o;
}

}  // namespace

GradCheckReport audit_vb_gradient(const GradientAuditSpec& spec) {
  const AuditProblem p = make_problem(spec);
  TrainConfig cfg;
  cfg.phase = Phase::kPretrain;
  cfg.fps_count = spec.fps_count;
  cfg.vb.lambda = spec.lambda;
  cfg.vb.squared = spec.squared_loss;
  Rng view_rng(derive_seed(spec.seed, kStreamAuditViews));
  const ViewPair views = draw_view_pair(view_rng, spec.points, cfg.augmentation);
  const PointCloud first = apply_transform(p.scene.cloud, views.first);
  const PointCloud second = apply_transform(p.scene.cloud, views.second);
  const SampleIndexSet sample = farthest_point_sampling(p.scene.cloud, spec.fps_count, views.fps_start);

  const SceneLoss analytic = vb_scene_loss(p.encoder, p.scene, views, cfg, true);
  auto loss = [&](const std::vector<Matrix>& tensors) {
    const Forward a = reference_encoder(tensors, first, *p.scene.neighbors);
    const Forward b = reference_encoder(tensors, second, *p.scene.neighbors);
    return LossSample{static_cast<double>(reference_vb_loss(a.features, b.features, sample.indices, cfg.vb)),
                      a.branch ^ (b.branch * 31)};
  };
  return gradient_check(BranchedParameterLoss(loss), copy_tensors(p.encoder.tensors()), analytic.grads, seeded(spec));
}

GradCheckReport audit_ce_gradient(const GradientAuditSpec& spec) {
  const AuditProblem p = make_problem(spec);
  Rng view_rng(derive_seed(spec.seed, kStreamAuditViews));
  const TransformSpec augmentation = sample_transform(view_rng, spec.points);
  const PointCloud input = apply_transform(p.scene.cloud, augmentation);

  const SceneLoss analytic = ce_scene_loss(p.encoder, p.head, p.scene, &augmentation, true);
  std::vector<Matrix> params = copy_tensors(p.encoder.tensors());
  const std::size_t encoder_tensors = params.size();
  for (const Matrix* m : p.head.tensors()) params.push_back(*m);

  auto loss = [&](const std::vector<Matrix>& tensors) {
    const std::vector<Matrix> encoder(tensors.begin(), tensors.begin() + static_cast<std::ptrdiff_t>(encoder_tensors));
    const Forward f = reference_encoder(encoder, input, *p.scene.neighbors);
    const Real ce = reference_cross_entropy(f.features, tensors[encoder_tensors], tensors[encoder_tensors + 1],
                                            p.scene.labels);
    return LossSample{static_cast<double>(ce), f.branch};
  };
  return gradient_check(BranchedParameterLoss(loss), params, analytic.grads, seeded(spec));
}

}  // namespace vbpc
