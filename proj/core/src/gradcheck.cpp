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

#include "vbpc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>

#include "vbpc/error.hpp"
#include "vbpc/random.hpp"

namespace vbpc {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
  return std::fabs(analytic - numeric) / denom;
}

std::string GradCheckReport::summary() const {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "%s: max relative error %.3e over %zu coordinates, %zu refined, %zu skipped (tensor %zu, "
                "index %zu: analytic %.6e, numeric %.6e)",
                passed ? "PASS" : "FAIL", max_relative_error, checked, refined, skipped, worst_tensor,
                worst_index, worst_analytic, worst_numeric);
  return buf;
}

namespace {

// Neville tableau over central differences at steps h, h/1.4, h/1.4^2, ...
// Stops when the extrapolation error grows or a step leaves the branch.
template <typename Central>
double ridders(double first, double h, Central central) {
  constexpr std::size_t kTable = 10;
  constexpr double kShrink = 1.4;
  constexpr double kShrink2 = kShrink * kShrink;
  constexpr double kSafe = 2.0;
  double table[kTable][kTable];
  table[0][0] = first;
  double best = first;
  double err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < kTable; ++i) {
    h /= kShrink;
    const std::optional<double> c = central(h);
    if (!c) break;
    table[0][i] = *c;
    double fac = kShrink2;
    for (std::size_t j = 1; j <= i; ++j) {
      table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
      fac *= kShrink2;
      const double e = std::max(std::fabs(table[j][i] - table[j - 1][i]), std::fabs(table[j][i] - table[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = table[j][i];
      }
    }
    if (std::fabs(table[i][i] - table[i - 1][i - 1]) >= kSafe * err) break;
  }
  return best;
}

}  // namespace

GradCheckReport gradient_check(const ParameterLoss& loss, const std::vector<Matrix>& params,
                               const GradientSet& analytic, const GradCheckOptions& options) {
  return gradient_check(BranchedParameterLoss([&](const std::vector<Matrix>& p) { return LossSample{loss(p), 0}; }),
                        params, analytic, options);
}

GradCheckReport gradient_check(const BranchedParameterLoss& loss, const std::vector<Matrix>& params,
                               const GradientSet& analytic, const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw NumericError("gradient_check: step must be positive");
  if (analytic.tensors.size() != params.size()) throw ShapeError("gradient_check: tensor count mismatch");
  for (std::size_t t = 0; t < params.size(); ++t) {
    require_same_shape(params[t], analytic.tensors[t], "gradient_check");
  }

  auto evaluate = [&](const std::vector<Matrix>& p) {
    const LossSample s = loss(p);
    if (!std::isfinite(s.value)) throw NumericError("gradient_check: loss is not finite");
    return s;
  };
  const std::uint64_t base_branch = evaluate(params).branch;

  Rng rng(options.seed);
  std::vector<Matrix> work = params;
  GradCheckReport report;
  bool first = true;
  for (std::size_t t = 0; t < params.size(); ++t) {
    const std::size_t n = params[t].size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    const std::size_t take = std::min(n, options.samples_per_tensor);
    for (std::size_t i = 0; i < take; ++i) std::swap(coords[i], coords[i + rng.uniform_index(n - i)]);
    coords.resize(take);
    std::sort(coords.begin(), coords.end());

    for (std::size_t idx : coords) {
      double& x = work[t].values()[idx];
      const double original = x;
      auto at = [&](double offset) {
        x = original + offset;
        const LossSample s = evaluate(work);
        x = original;
        return s;
      };

      std::optional<double> numeric;
      double h = options.step;
      for (std::size_t attempt = 0; attempt <= options.max_step_halvings; ++attempt, h *= 0.5) {
        const LossSample up = at(h);
        const LossSample down = at(-h);
        if (up.branch != base_branch || down.branch != base_branch) continue;
        const double central = (up.value - down.value) / (2.0 * h);
        if (options.stencil == Stencil::kTwoPoint) {
          numeric = central;
        } else if (options.stencil == Stencil::kFourPoint) {
          const LossSample up2 = at(2.0 * h);
          const LossSample down2 = at(-2.0 * h);
          if (up2.branch != base_branch || down2.branch != base_branch) continue;
          numeric = (8.0 * (up.value - down.value) - (up2.value - down2.value)) / (12.0 * h);
        } else {
          numeric = ridders(central, h, [&](double step) -> std::optional<double> {
            const LossSample u = at(step);
            const LossSample d = at(-step);
            if (u.branch != base_branch || d.branch != base_branch) return std::nullopt;
            return (u.value - d.value) / (2.0 * step);
          });
        }
        if (attempt > 0) ++report.refined;
        break;
      }
      if (!numeric) {
        ++report.skipped;
        continue;
      }

      const double a = analytic.tensors[t].values()[idx];
      const double err = relative_error(a, *numeric);
      ++report.checked;
      if (first || err > report.max_relative_error) {
        first = false;
        report.max_relative_error = err;
        report.worst_tensor = t;
        report.worst_index = idx;
        report.worst_analytic = a;
        report.worst_numeric = *numeric;
      }
    }
  }
  report.passed = report.checked > 0 && report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace vbpc
