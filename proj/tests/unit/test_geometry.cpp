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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "test_support.hpp"
#include "vbpc/error.hpp"
#include "vbpc/neighbors.hpp"
#include "vbpc/sampling.hpp"
#include "vbpc/transform.hpp"
#include "vbpc/voxel.hpp"

namespace vbpc {
namespace {

double dist2(const Vec3& a, const Vec3& b) {
  double s = 0;
  for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

// Reference FPS: for each step, recompute every candidate's minimum distance
// to the whole selected set from scratch.
std::vector<std::size_t> brute_force_fps(const PointCloud& c, std::size_t h, std::size_t start) {
  std::vector<std::size_t> sel{start};
  std::vector<bool> taken(c.size(), false);
  taken[start] = true;
  while (sel.size() < h) {
    double best = -1;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (taken[i]) continue;
      double md = std::numeric_limits<double>::infinity();
      for (std::size_t s : sel) md = std::min(md, dist2(c.positions[i], c.positions[s]));
      if (md > best) {
        best = md;
        arg = i;
      }
    }
    sel.push_back(arg);
    taken[arg] = true;
  }
  return sel;
}

PointCloud single_point(double x, double y, double z) {
  PointCloud c;
  c.positions = {{x, y, z}};
  c.colors = {{10, 20, 30}};
  return c;
}

TEST(Transform, IdentityLeavesCloudUnchanged) {
  Rng rng(1);
  const PointCloud c = testing::random_cloud(rng, 50);
  EXPECT_EQ(apply_transform(c, TransformSpec::identity(50)), c);
}

TEST(Transform, QuarterTurn) {
  TransformSpec t = TransformSpec::identity(1);
  t.z_rotation = std::numbers::pi / 2;
  const PointCloud out = apply_transform(single_point(1, 0, 0), t);
  EXPECT_NEAR(out.positions[0][0], 0.0, 1e-12);
  EXPECT_NEAR(out.positions[0][1], 1.0, 1e-12);
  EXPECT_NEAR(out.positions[0][2], 0.0, 1e-12);
}

TEST(Transform, MirrorX) {
  TransformSpec t = TransformSpec::identity(1);
  t.mirror = {true, false, false};
  EXPECT_EQ(apply_transform(single_point(1, 2, 3), t).positions[0], (Vec3{-1, 2, 3}));
}

TEST(Transform, JitterClampsColors) {
  TransformSpec t = TransformSpec::identity(1);
  t.color_jitter = {{-50, 300, 5}};
  EXPECT_EQ(apply_transform(single_point(0, 0, 0), t).colors[0], (Vec3{0, 255, 35}));
}

TEST(Transform, JitterLengthMismatchIsError) {
  EXPECT_THROW(apply_transform(single_point(0, 0, 0), TransformSpec::identity(2)), ShapeError);
}

TEST(Transform, SamplingIsDeterministic) {
  Rng a(42), b(42);
  const TransformSpec x = sample_transform(a, 10);
  const TransformSpec y = sample_transform(b, 10);
  EXPECT_EQ(x.z_rotation, y.z_rotation);
  EXPECT_EQ(x.mirror, y.mirror);
  EXPECT_EQ(x.color_jitter, y.color_jitter);
}

TEST(Transform, MonteCarloRates) {
  Rng rng(2024);
  std::array<int, 3> mirrors{0, 0, 0};
  double sum = 0, sq = 0;
  std::size_t n = 0;
  double angle_min = 10, angle_max = -1;
  for (int i = 0; i < 10000; ++i) {
    const TransformSpec t = sample_transform(rng, 1);
    for (int a = 0; a < 3; ++a) mirrors[a] += t.mirror[a];
    for (double v : t.color_jitter[0]) {
      sum += v;
      sq += v * v;
      ++n;
    }
    angle_min = std::min(angle_min, t.z_rotation);
    angle_max = std::max(angle_max, t.z_rotation);
  }
  for (int a = 0; a < 3; ++a) {
    EXPECT_GE(mirrors[a] / 10000.0, 0.47);
    EXPECT_LE(mirrors[a] / 10000.0, 0.53);
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_GE(sd, 12.4);
  EXPECT_LE(sd, 13.1);
  EXPECT_GE(angle_min, 0.0);
  EXPECT_LT(angle_max, 2 * std::numbers::pi);
}

TEST(Transform, PropertyIsometry) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud c = testing::random_cloud(rng, 40, 5.0);
    const PointCloud t = apply_transform(c, sample_transform(rng, 40));
    for (std::size_t i = 0; i < 40; ++i) {
      for (std::size_t j = i + 1; j < 40; ++j) {
        ASSERT_NEAR(std::sqrt(dist2(c.positions[i], c.positions[j])),
                    std::sqrt(dist2(t.positions[i], t.positions[j])), 1e-9);
      }
    }
  }
}

TEST(Transform, PropertyRotationsCompose) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const PointCloud c = testing::random_cloud(rng, 20, 3.0);
    const double a = 2 * std::numbers::pi * rng.uniform();
    const double b = 2 * std::numbers::pi * rng.uniform();
    TransformSpec ta = TransformSpec::identity(20), tb = ta, tab = ta;
    ta.z_rotation = a;
    tb.z_rotation = b;
    tab.z_rotation = std::fmod(a + b, 2 * std::numbers::pi);
    const PointCloud two = apply_transform(apply_transform(c, ta), tb);
    const PointCloud one = apply_transform(c, tab);
    for (std::size_t i = 0; i < 20; ++i) {
      for (int k = 0; k < 3; ++k) ASSERT_NEAR(two.positions[i][k], one.positions[i][k], 1e-9);
    }
  }
}

TEST(Fps, CollinearExample) {
  PointCloud c;
  for (int x = 0; x < 10; ++x) {
    c.positions.push_back({static_cast<double>(x), 0, 0});
    c.colors.push_back({0, 0, 0});
  }
  EXPECT_EQ(farthest_point_sampling(c, 3, 0).indices, (std::vector<std::size_t>{0, 9, 4}));
}

TEST(Fps, SingleSampleIsStart) {
  Rng rng(3);
  const PointCloud c = testing::random_cloud(rng, 30);
  EXPECT_EQ(farthest_point_sampling(c, 1, 17).indices, (std::vector<std::size_t>{17}));
}

TEST(Fps, ExhaustionIsPermutation) {
  Rng rng(4);
  const PointCloud c = testing::lattice_cloud(rng, 64, 3);  // many duplicates
  std::vector<std::size_t> idx = farthest_point_sampling(c, 64, 5).indices;
  std::sort(idx.begin(), idx.end());
  std::vector<std::size_t> all(64);
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_EQ(idx, all);
}

TEST(Fps, Errors) {
  Rng rng(5);
  const PointCloud c = testing::random_cloud(rng, 8);
  EXPECT_THROW(farthest_point_sampling(c, 9, 0), DataError);
  EXPECT_THROW(farthest_point_sampling(c, 0, 0), DataError);
  EXPECT_THROW(farthest_point_sampling(c, 2, 8), DataError);
}

TEST(Fps, PropertyMatchesBruteForce) {
  Rng rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(200);
    const PointCloud c = trial % 2 ? testing::lattice_cloud(rng, m, 4) : testing::random_cloud(rng, m);
    const std::size_t h = 1 + rng.uniform_index(m);
    const std::size_t start = rng.uniform_index(m);
    ASSERT_EQ(farthest_point_sampling(c, h, start).indices, brute_force_fps(c, h, start))
        << "trial " << trial << " m " << m << " h " << h;
  }
}

TEST(Fps, PropertyMinSeparationNonIncreasing) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud c = testing::random_cloud(rng, 150);
    const std::size_t start = rng.uniform_index(150);
    const auto full = farthest_point_sampling(c, 150, start).indices;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t h = 2; h <= 150; ++h) {
      double sep = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = i + 1; j < h; ++j) sep = std::min(sep, dist2(c.positions[full[i]], c.positions[full[j]]));
      }
      ASSERT_LE(sep, prev);
      prev = sep;
      // A prefix of a longer run is the shorter run.
      if (h % 37 == 0) {
        ASSERT_EQ(farthest_point_sampling(c, h, start).indices, std::vector(full.begin(), full.begin() + h));
      }
    }
  }
}

TEST(Voxel, SparsePointsPassThrough) {
  PointCloud c;
  c.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  c.colors = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  SparseLabelSet l(3, 3);
  l.labels = {0, std::nullopt, 2};
  const VoxelizedCloud v = voxel_downsample(c, l, 0.02);
  EXPECT_EQ(v.cloud, c);
  EXPECT_EQ(v.labels, l);
  EXPECT_EQ(v.voxel_of_point, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Voxel, CentroidOfTwoPoints) {
  PointCloud c;
  c.positions = {{0, 0, 0}, {0.005, 0, 0}};
  c.colors = {{0, 0, 0}, {10, 20, 30}};
  const VoxelizedCloud v = voxel_downsample(c, SparseLabelSet(2, 2), 0.02);
  ASSERT_EQ(v.cloud.size(), 1u);
  EXPECT_DOUBLE_EQ(v.cloud.positions[0][0], 0.0025);
  EXPECT_EQ(v.cloud.colors[0], (Vec3{5, 10, 15}));
  EXPECT_FALSE(v.labels.labels[0].has_value());
}

TEST(Voxel, MajorityLabelWithLowestClassOnTies) {
  PointCloud c;
  c.positions.assign(5, Vec3{0.001, 0.001, 0.001});
  c.colors.assign(5, Vec3{0, 0, 0});
  SparseLabelSet l(5, 4);
  l.labels = {1, 1, 2, std::nullopt, std::nullopt};
  EXPECT_EQ(voxel_downsample(c, l, 0.02).labels.labels[0], 1);
  l.labels = {3, 2, 3, 2, std::nullopt};
  EXPECT_EQ(voxel_downsample(c, l, 0.02).labels.labels[0], 2);
}

TEST(Voxel, NegativeCoordinatesUseFloorCells) {
  PointCloud c;
  c.positions = {{-0.001, 0, 0}, {0.001, 0, 0}};
  c.colors.assign(2, Vec3{0, 0, 0});
  EXPECT_EQ(voxel_downsample(c, SparseLabelSet(2, 2), 0.02).cloud.size(), 2u);
}

TEST(Voxel, PropertyMappingIsTotalAndConsistent) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(500);
    const PointCloud c = testing::random_cloud(rng, m, 0.1);
    SparseLabelSet l(m, 3);
    for (auto& v : l.labels) {
      if (rng.bernoulli(0.5)) v = static_cast<int>(rng.uniform_index(3));
    }
    const double size = 0.01 + 0.05 * rng.uniform();
    const VoxelizedCloud v = voxel_downsample(c, l, size);
    ASSERT_LE(v.cloud.size(), m);
    ASSERT_EQ(v.voxel_of_point.size(), m);
    ASSERT_EQ(v.labels.size(), v.cloud.size());
    std::vector<Vec3> sum(v.cloud.size(), Vec3{0, 0, 0});
    std::vector<double> count(v.cloud.size(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = v.voxel_of_point[i];
      ASSERT_LT(k, v.cloud.size());
      for (int a = 0; a < 3; ++a) sum[k][a] += c.positions[i][a];
      count[k] += 1;
    }
    for (std::size_t k = 0; k < v.cloud.size(); ++k) {
      ASSERT_GT(count[k], 0);
      for (int a = 0; a < 3; ++a) ASSERT_NEAR(v.cloud.positions[k][a], sum[k][a] / count[k], 1e-12);
    }
    // Points sharing a voxel share a cell; distinct voxels have distinct cells.
    std::set<std::array<long long, 3>> cells;
    std::vector<std::array<long long, 3>> cell_of(v.cloud.size());
    std::vector<bool> seen(v.cloud.size(), false);
    for (std::size_t i = 0; i < m; ++i) {
      std::array<long long, 3> cell;
      for (int a = 0; a < 3; ++a) cell[a] = static_cast<long long>(std::floor(c.positions[i][a] / size));
      const std::size_t k = v.voxel_of_point[i];
      if (seen[k]) {
        ASSERT_EQ(cell_of[k], cell);
      } else {
        seen[k] = true;
        cell_of[k] = cell;
        ASSERT_TRUE(cells.insert(cell).second);
      }
    }
    const std::vector<int> per_voxel(v.cloud.size(), 1);
    ASSERT_EQ(project_to_points(per_voxel, v.voxel_of_point).size(), m);
  }
}

TEST(Neighbors, PropertyMatchesBruteForce) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + rng.uniform_index(300);
    const PointCloud c = trial % 3 == 0 ? testing::lattice_cloud(rng, m, 5) : testing::random_cloud(rng, m, 2.0);
    const std::size_t k = rng.uniform_index(std::min<std::size_t>(m, 20));
    const NeighborIndex idx = build_neighbor_index(c, k);
    ASSERT_EQ(idx.num_points(), m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::size_t> order;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) order.push_back(j);
      }
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dist2(c.positions[i], c.positions[a]) < dist2(c.positions[i], c.positions[b]);
      });
      const auto row = idx.row(i);
      ASSERT_EQ(row[0], i);
      for (std::size_t n = 0; n < k; ++n) ASSERT_EQ(row[n + 1], order[n]) << "trial " << trial << " point " << i;
    }
  }
}

TEST(Neighbors, KMustBeBelowPointCount) {
  Rng rng(13);
  EXPECT_THROW(build_neighbor_index(testing::random_cloud(rng, 4), 4), DataError);
  EXPECT_NO_THROW(build_neighbor_index(testing::random_cloud(rng, 1), 0));
}

}  // namespace
}  // namespace vbpc
