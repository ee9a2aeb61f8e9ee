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


#include <benchmark/benchmark.h>

#include <memory>

#include "vbpc/encoder.hpp"
#include "vbpc/neighbors.hpp"
#include "vbpc/sampling.hpp"
#include "vbpc/synthetic.hpp"
#include "vbpc/vb_loss.hpp"
#include "vbpc/voxel.hpp"

namespace vbpc {
namespace {

SyntheticScene bench_scene(std::size_t points) { return generate_synthetic_scene(7, points, 4); }

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal(0.0, 1.0);
  return m;
}

void BM_FarthestPointSampling(benchmark::State& state) {
  const auto scene = bench_scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(farthest_point_sampling(scene.cloud, 256, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FarthestPointSampling)->Arg(2048)->Arg(8192);

void BM_NeighborIndex(benchmark::State& state) {
  const auto scene = bench_scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_neighbor_index(scene.cloud, 16));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NeighborIndex)->Arg(2048)->Arg(8192);

void BM_VoxelDownsample(benchmark::State& state) {
  const auto scene = bench_scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(voxel_downsample(scene.cloud, scene.labels, 0.02));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VoxelDownsample)->Arg(2048)->Arg(32768);

void BM_EncoderForward(benchmark::State& state) {
  const auto scene = bench_scene(2048);
  Rng rng(1);
  const auto params = EncoderParams::initialize({{64, 64}, 32, 16}, rng);
  const auto neighbors = std::make_shared<const NeighborIndex>(build_neighbor_index(scene.cloud, 16));
  for (auto _ : state) benchmark::DoNotOptimize(encoder_forward(params, scene.cloud, neighbors));
}
BENCHMARK(BM_EncoderForward);

void BM_EncoderBackward(benchmark::State& state) {
  const auto scene = bench_scene(2048);
  Rng rng(1);
  const auto params = EncoderParams::initialize({{64, 64}, 32, 16}, rng);
  const auto out = encoder_forward(params, scene.cloud);
  const Matrix upstream = random_matrix(rng, out.features.rows(), out.features.cols());
  for (auto _ : state) benchmark::DoNotOptimize(encoder_backward(params, out.tape, upstream));
}
BENCHMARK(BM_EncoderBackward);

void BM_VbLossBackward(benchmark::State& state) {
  Rng rng(2);
  const auto d = static_cast<std::size_t>(state.range(0));
  const Matrix zp = random_matrix(rng, 256, d), zq = random_matrix(rng, 256, d);
  VbConfig cfg;
  cfg.lambda = 1.0 / static_cast<double>(d);
  for (auto _ : state) benchmark::DoNotOptimize(vb_loss_backward(zp, zq, cfg));
}
BENCHMARK(BM_VbLossBackward)->Arg(32)->Arg(128);

}  // namespace
}  // namespace vbpc

BENCHMARK_MAIN();
