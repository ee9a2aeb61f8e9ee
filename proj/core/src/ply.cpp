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

#include "vbpc/ply.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "vbpc/error.hpp"

namespace vbpc {
namespace {

enum class ScalarType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::kInt8;
  if (name == "uchar" || name == "uint8") return ScalarType::kUInt8;
  if (name == "short" || name == "int16") return ScalarType::kInt16;
  if (name == "ushort" || name == "uint16") return ScalarType::kUInt16;
  if (name == "int" || name == "int32") return ScalarType::kInt32;
  if (name == "uint" || name == "uint32") return ScalarType::kUInt32;
  if (name == "float" || name == "float32") return ScalarType::kFloat32;
  if (name == "double" || name == "float64") return ScalarType::kFloat64;
  return std::nullopt;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kUInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  PlyFormat format = PlyFormat::kAscii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

[[noreturn]] void fail(std::string_view source, std::size_t offset, const std::string& what) {
  throw DataError(std::string(source) + ": " + what + " (at byte offset " +
                  std::to_string(offset) + ")");
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

Header parse_header(std::string_view content, std::string_view source) {
  Header header;
  std::size_t pos = 0;
  bool saw_format = false;
  bool first = true;
  while (true) {
    const std::size_t line_start = pos;
    const std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) fail(source, line_start, "header not terminated by end_header");
    const std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    const auto words = split_words(line);
    if (first) {
      if (words.size() != 1 || words[0] != "ply") fail(source, line_start, "missing 'ply' magic line");
      first = false;
      continue;
    }
    if (words.empty() || words[0] == "comment" || words[0] == "obj_info") continue;
    if (words[0] == "format") {
      if (words.size() != 3) fail(source, line_start, "malformed format line");
      if (words[1] == "ascii") {
        header.format = PlyFormat::kAscii;
      } else if (words[1] == "binary_little_endian") {
        header.format = PlyFormat::kBinaryLittleEndian;
      } else if (words[1] == "binary_big_endian") {
        fail(source, line_start, "unsupported endianness 'binary_big_endian'");
      } else {
        fail(source, line_start, "unknown format '" + std::string(words[1]) + "'");
      }
      if (words[2] != "1.0") fail(source, line_start, "unsupported PLY version " + std::string(words[2]));
      saw_format = true;
    } else if (words[0] == "element") {
      if (words.size() != 3) fail(source, line_start, "malformed element line");
      Element element;
      element.name = std::string(words[1]);
      const auto* end = words[2].data() + words[2].size();
      auto [ptr, ec] = std::from_chars(words[2].data(), end, element.count);
      if (ec != std::errc() || ptr != end) fail(source, line_start, "malformed element count");
      header.elements.push_back(std::move(element));
    } else if (words[0] == "property") {
      if (header.elements.empty()) fail(source, line_start, "property before any element");
      Property prop;
      if (words.size() == 5 && words[1] == "list") {
        const auto count_type = parse_scalar_type(words[2]);
        const auto item_type = parse_scalar_type(words[3]);
        if (!count_type || !item_type) fail(source, line_start, "unknown list property type");
        if (*count_type == ScalarType::kFloat32 || *count_type == ScalarType::kFloat64) {
          fail(source, line_start, "list count type must be integral");
        }
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
        prop.name = std::string(words[4]);
      } else if (words.size() == 3) {
        const auto type = parse_scalar_type(words[1]);
        if (!type) fail(source, line_start, "unknown property type '" + std::string(words[1]) + "'");
        prop.type = *type;
        prop.name = std::string(words[2]);
      } else {
        fail(source, line_start, "malformed property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else if (words[0] == "end_header") {
      break;
    } else {
      fail(source, line_start, "unknown header keyword '" + std::string(words[0]) + "'");
    }
  }
  if (!saw_format) fail(source, 0, "missing format line");
  header.body_offset = pos;
  return header;
}

// Sequential reader over the body; both encodings expose the same calls.
class BodyReader {
 public:
  BodyReader(std::string_view content, std::size_t offset, PlyFormat format, std::string_view source)
      : content_(content), pos_(offset), format_(format), source_(source) {}

  double read(ScalarType type) {
    if (format_ != PlyFormat::kAscii) return read_binary(type);
    const double value = read_ascii();
    return type == ScalarType::kFloat32 ? static_cast<double>(static_cast<float>(value)) : value;
  }

  std::size_t offset() const { return pos_; }

 private:
  double read_ascii() {
    while (pos_ < content_.size() && std::isspace(static_cast<unsigned char>(content_[pos_]))) ++pos_;
    if (pos_ >= content_.size()) fail(source_, pos_, "truncated payload: expected another value");
    const std::size_t start = pos_;
    while (pos_ < content_.size() && !std::isspace(static_cast<unsigned char>(content_[pos_]))) ++pos_;
    double value = 0.0;
    const char* first = content_.data() + start;
    const char* last = content_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(source_, start, "malformed number in payload");
    return value;
  }

  template <typename T>
  T load_le() {
    if (content_.size() - pos_ < sizeof(T)) {
      fail(source_, pos_, "truncated payload: expected " + std::to_string(sizeof(T)) + " more bytes");
    }
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, content_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  double read_binary(ScalarType type) {
    switch (type) {
      case ScalarType::kInt8: return load_le<std::int8_t>();
      case ScalarType::kUInt8: return load_le<std::uint8_t>();
      case ScalarType::kInt16: return load_le<std::int16_t>();
      case ScalarType::kUInt16: return load_le<std::uint16_t>();
      case ScalarType::kInt32: return load_le<std::int32_t>();
      case ScalarType::kUInt32: return load_le<std::uint32_t>();
      case ScalarType::kFloat32: return load_le<float>();
      case ScalarType::kFloat64: return load_le<double>();
    }
    return 0.0;
  }

  std::string_view content_;
  std::size_t pos_;
  PlyFormat format_;
  std::string_view source_;
};

void skip_element(BodyReader& reader, const Element& element, std::string_view source) {
  for (std::size_t i = 0; i < element.count; ++i) {
    for (const auto& prop : element.properties) {
      if (prop.is_list) {
        const std::size_t at = reader.offset();
        const double n = reader.read(prop.count_type);
        if (n < 0 || n != std::floor(n)) fail(source, at, "invalid list length");
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) reader.read(prop.type);
      } else {
        reader.read(prop.type);
      }
    }
  }
}

}  // namespace

PointCloud parse_ply(std::string_view content, std::string_view source,
                     std::vector<std::string>* warnings) {
  const Header header = parse_header(content, source);

  const auto vertex_it = std::find_if(header.elements.begin(), header.elements.end(),
                                      [](const Element& e) { return e.name == "vertex"; });
  if (vertex_it == header.elements.end()) fail(source, 0, "no vertex element declared");

  constexpr std::array<std::string_view, 6> kRequired = {"x", "y", "z", "red", "green", "blue"};
  std::array<std::optional<std::size_t>, 6> slot{};
  for (std::size_t p = 0; p < vertex_it->properties.size(); ++p) {
    const auto& prop = vertex_it->properties[p];
    for (std::size_t r = 0; r < kRequired.size(); ++r) {
      if (prop.name != kRequired[r]) continue;
      const bool is_position = r < 3;
      const bool ok = !prop.is_list &&
                      (is_position ? (prop.type == ScalarType::kFloat32 || prop.type == ScalarType::kFloat64)
                                   : prop.type == ScalarType::kUInt8);
      if (!ok) {
        fail(source, 0, "vertex property '" + prop.name + "' must be " +
                            (is_position ? "float or double" : "uchar"));
      }
      slot[r] = p;
    }
  }
  for (std::size_t r = 0; r < kRequired.size(); ++r) {
    if (!slot[r]) fail(source, 0, "missing required vertex property '" + std::string(kRequired[r]) + "'");
  }
  if (vertex_it->count == 0) fail(source, 0, "vertex element is empty");

  BodyReader reader(content, header.body_offset, header.format, source);
  PointCloud cloud;
  for (const auto& element : header.elements) {
    if (&element != &*vertex_it) {
      if (warnings) {
        warnings->push_back("skipped element '" + element.name + "' (" +
                            std::to_string(element.count) + " entries)");
      }
      // Elements after the vertex block never need to be read.
      if (&element > &*vertex_it) break;
      skip_element(reader, element, source);
      continue;
    }
    cloud.positions.resize(element.count);
    cloud.colors.resize(element.count);
    std::vector<double> values(element.properties.size());
    for (std::size_t i = 0; i < element.count; ++i) {
      for (std::size_t p = 0; p < element.properties.size(); ++p) {
        const auto& prop = element.properties[p];
        if (prop.is_list) {
          const std::size_t at = reader.offset();
          const double n = reader.read(prop.count_type);
          if (n < 0 || n != std::floor(n)) fail(source, at, "invalid list length");
          for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) reader.read(prop.type);
          continue;
        }
        const std::size_t at = reader.offset();
        values[p] = reader.read(prop.type);
        if (prop.type == ScalarType::kUInt8 && (values[p] < 0 || values[p] > 255 ||
                                                values[p] != std::floor(values[p]))) {
          fail(source, at, "color value out of uchar range");
        }
      }
      for (int a = 0; a < 3; ++a) {
        cloud.positions[i][a] = values[*slot[a]];
        cloud.colors[i][a] = values[*slot[a + 3]];
      }
    }
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(cloud.positions[i][a])) {
        fail(source, header.body_offset, "non-finite coordinate at vertex " + std::to_string(i));
      }
    }
  }
  return cloud;
}

PointCloud load_ply(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_ply(content, path.string(), warnings);
}

std::string format_ply(const PointCloud& cloud, PlyFormat format) {
  std::ostringstream out;
  out << "ply\n"
      << (format == PlyFormat::kAscii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "comment written by vbpc\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  auto to_u8 = [](double c) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(c), 0L, 255L));
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (format == PlyFormat::kAscii) {
      char buf[128];
      const auto& p = cloud.positions[i];
      const auto& c = cloud.colors[i];
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %u %u %u\n", static_cast<double>(static_cast<float>(p[0])),
                    static_cast<double>(static_cast<float>(p[1])), static_cast<double>(static_cast<float>(p[2])),
                    unsigned{to_u8(c[0])}, unsigned{to_u8(c[1])}, unsigned{to_u8(c[2])});
      out << buf;
    } else {
      for (int a = 0; a < 3; ++a) {
        const float f = static_cast<float>(cloud.positions[i][a]);
        unsigned char bytes[4];
        std::memcpy(bytes, &f, 4);
        if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 4);
        out.write(reinterpret_cast<const char*>(bytes), 4);
      }
      for (int a = 0; a < 3; ++a) out.put(static_cast<char>(to_u8(cloud.colors[i][a])));
    }
  }
  return out.str();
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << format_ply(cloud, format);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace vbpc
