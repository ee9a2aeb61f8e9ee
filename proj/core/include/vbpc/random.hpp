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

#ifndef VBPC_RANDOM_HPP_
#define VBPC_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace vbpc {

/// Mixes a base seed with a stream tag (splitmix64 finalizer) so that
/// independent consumers of one run seed get decorrelated generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with portable distribution transforms.
///
/// The standard <random> distributions are implementation-defined, so every
/// draw here is built directly from raw 64-bit engine output. The engine
/// state serializes to text, which makes the generator checkpointable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Box-Muller draw; consumes exactly two engine outputs.
  double normal(double mean, double stddev);

  std::string serialize() const;
  static Rng deserialize(std::string_view text);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vbpc

#endif  // VBPC_RANDOM_HPP_
