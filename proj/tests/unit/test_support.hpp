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

#ifndef VBPC_TESTS_TEST_SUPPORT_HPP_
#define VBPC_TESTS_TEST_SUPPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "vbpc/matrix.hpp"
#include "vbpc/point_cloud.hpp"
#include "vbpc/random.hpp"

namespace vbpc::testing {

inline PointCloud random_cloud(Rng& rng, std::size_t m, double extent = 1.0) {
  PointCloud c;
  c.positions.resize(m);
  c.colors.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (int a = 0; a < 3; ++a) {
      c.positions[i][a] = extent * (2.0 * rng.uniform() - 1.0);
      c.colors[i][a] = static_cast<double>(rng.uniform_index(256));
    }
  }
  return c;
}

// Positions on a small integer lattice, so exact distance ties are common.
inline PointCloud lattice_cloud(Rng& rng, std::size_t m, std::size_t side) {
  PointCloud c;
  c.positions.resize(m);
  c.colors.assign(m, Vec3{0, 0, 0});
  for (auto& p : c.positions) {
    for (int a = 0; a < 3; ++a) p[a] = static_cast<double>(rng.uniform_index(side));
  }
  return c;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double stddev = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal(0.0, stddev);
  return m;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ reinterpret_cast<std::uintptr_t>(this));
    path_ = std::filesystem::temp_directory_path() / ("vbpc_" + tag + "_" + std::to_string(rng.next_u64() % 1000000000));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace vbpc::testing

#endif  // VBPC_TESTS_TEST_SUPPORT_HPP_
