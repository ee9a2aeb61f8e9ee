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

#include "vbpc/labels.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <string>

#include "vbpc/error.hpp"
#include "vbpc/random.hpp"

namespace vbpc {
namespace {

bool parse_integer(std::string_view& rest, long long& value) {
  std::size_t i = 0;
  while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t' || rest[i] == '\r')) ++i;
  rest.remove_prefix(i);
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc() || ptr == rest.data()) return false;
  rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
  return true;
}

}  // namespace

SparseLabelSet parse_labels(std::string_view content, int num_classes, std::string_view source) {
  if (num_classes <= 0) throw DataError("num_classes must be positive");
  std::vector<std::pair<std::size_t, int>> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    long long index = 0;
    long long cls = 0;
    std::string_view rest = line;
    if (!parse_integer(rest, index) || !parse_integer(rest, cls) ||
        rest.find_first_not_of(" \t\r") != std::string_view::npos) {
      throw DataError(where + ": expected '<index> <class>'");
    }
    if (index < 0) throw DataError(where + ": negative point index");
    if (cls < 0 || cls >= num_classes) {
      throw DataError(where + ": class " + std::to_string(cls) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
    const auto idx = static_cast<std::size_t>(index);
    if (!records.empty() && idx == records.back().first) {
      throw DataError(where + ": duplicate index " + std::to_string(idx));
    }
    if (!records.empty() && idx < records.back().first) {
      throw DataError(where + ": indices must be strictly increasing");
    }
    records.emplace_back(idx, static_cast<int>(cls));
  }
  SparseLabelSet out(records.empty() ? 0 : records.back().first + 1, num_classes);
  for (const auto& [idx, cls] : records) out.labels[idx] = cls;
  return out;
}

SparseLabelSet load_labels(const std::filesystem::path& path, int num_classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_labels(content, num_classes, path.string());
}

SparseLabelSet attach_labels(const SparseLabelSet& labels, std::size_t num_points) {
  if (labels.size() > num_points) {
    for (std::size_t i = num_points; i < labels.size(); ++i) {
      if (labels.labels[i]) {
        throw DataError("label index " + std::to_string(i) + " out of range for cloud of " +
                        std::to_string(num_points) + " points");
      }
    }
  }
  SparseLabelSet out(num_points, labels.num_classes);
  const std::size_t n = std::min(num_points, labels.size());
  std::copy_n(labels.labels.begin(), n, out.labels.begin());
  return out;
}

void write_labels(const std::filesystem::path& path, const SparseLabelSet& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i]) out << i << ' ' << *labels.labels[i] << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

SparseLabelSet subsample_labels(const SparseLabelSet& labels, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw DataError("subsample_labels: k must be at least 1");
  std::vector<std::size_t> present = labels.present_indices();
  if (present.size() < k) {
    throw DataError("subsample_labels: requested " + std::to_string(k) + " labels but only " +
                    std::to_string(present.size()) + " are present");
  }
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(present.size() - i);
    std::swap(present[i], present[j]);
  }
  SparseLabelSet out(labels.size(), labels.num_classes);
  for (std::size_t i = 0; i < k; ++i) out.labels[present[i]] = labels.labels[present[i]];
  return out;
}

}  // namespace vbpc
