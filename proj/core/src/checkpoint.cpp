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

#include "vbpc/checkpoint.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <vector>

#include "vbpc/error.hpp"

namespace vbpc {
namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out_.append(reinterpret_cast<const char*>(bytes), sizeof(T));
  }
  void put_bytes(std::string_view s) { out_.append(s); }
  void put_text(std::string_view s) {
    put<std::uint64_t>(s.size());
    put_bytes(s);
  }
  void put_tensor(const std::string& name, const Matrix& m) {
    put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    put_bytes(name);
    put<std::uint32_t>(2);
    put<std::uint64_t>(m.rows());
    put<std::uint64_t>(m.cols());
    for (double v : m.values()) put(v);
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    T value;
    std::memcpy(&value, raw, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string_view get_bytes(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view get_text() { return get_bytes(static_cast<std::size_t>(get<std::uint64_t>())); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw DataError("checkpoint truncated at byte offset " + std::to_string(pos_));
    }
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::map<std::string, std::string> parse_state_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    const auto eq = line.find(" = ");
    if (eq == std::string_view::npos) throw DataError("checkpoint state line malformed");
    out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
  }
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("checkpoint state value malformed");
  return v;
}

}  // namespace

std::string serialize_checkpoint(const TrainState& state, std::string_view config_text) {
  Writer w;
  w.put_bytes(std::string_view(kCheckpointMagic, 4));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put_text(config_text);
  w.put_text("step = " + std::to_string(state.step) + "\nknn = " + std::to_string(state.encoder.knn) +
             "\nrng = " + state.rng.serialize());

  const auto params = state.parameters();
  const auto names = state.parameter_names();
  const bool with_momentum = !state.momentum.empty();
  if (with_momentum && state.momentum.size() != params.size()) {
    throw ShapeError("checkpoint: momentum buffer count does not match parameters");
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size() * (with_momentum ? 2 : 1)));
  for (std::size_t i = 0; i < params.size(); ++i) w.put_tensor(names[i], *params[i]);
  if (with_momentum) {
    for (std::size_t i = 0; i < params.size(); ++i) w.put_tensor("momentum/" + names[i], state.momentum[i]);
  }
  w.put<std::uint32_t>(crc_of(w.str()));
  return std::move(w.str());
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw DataError("not a vbpc checkpoint (bad magic)");
  }
  Reader r(bytes);
  r.get_bytes(4);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.get<std::uint32_t>() != crc_of(body)) throw DataError("checkpoint CRC mismatch");

  Checkpoint ckpt;
  ckpt.config_text = std::string(r.get_text());
  const auto state_kv = parse_state_text(r.get_text());
  for (const char* key : {"step", "knn", "rng"}) {
    if (!state_kv.count(key)) throw DataError(std::string("checkpoint state lacks '") + key + "'");
  }
  TrainState& state = ckpt.state;
  state.step = parse_u64(state_kv.at("step"));
  state.encoder.knn = static_cast<std::size_t>(parse_u64(state_kv.at("knn")));
  state.rng = Rng::deserialize(state_kv.at("rng"));

  std::map<std::string, Matrix> tensors;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t t = 0; t < count; ++t) {
    std::string name(r.get_bytes(r.get<std::uint32_t>()));
    if (r.get<std::uint32_t>() != 2) throw DataError("checkpoint tensor '" + name + "' is not rank 2");
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (rows == 0 || cols == 0 || rows > (bytes.size() / 8) || cols > (bytes.size() / 8)) {
      throw DataError("checkpoint tensor '" + name + "' has invalid shape");
    }
    Matrix m(rows, cols);
    for (auto& v : m.values()) v = r.get<double>();
    if (!tensors.emplace(std::move(name), std::move(m)).second) throw DataError("duplicate checkpoint tensor");
  }
  if (r.pos() != body.size()) throw DataError("checkpoint has trailing bytes before CRC");

  auto take = [&](const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw DataError("checkpoint lacks tensor '" + name + "'");
    Matrix m = std::move(it->second);
    tensors.erase(it);
    return m;
  };
  for (std::size_t l = 0; tensors.count("encoder." + std::to_string(l) + ".weight"); ++l) {
    DenseLayer layer;
    layer.weight = take("encoder." + std::to_string(l) + ".weight");
    layer.bias = take("encoder." + std::to_string(l) + ".bias");
    state.encoder.layers.push_back(std::move(layer));
  }
  if (tensors.count("head.weight")) state.head = HeadParams{take("head.weight"), take("head.bias")};
  try {
    state.encoder.validate();
  } catch (const ShapeError& e) {
    throw DataError(std::string("checkpoint encoder invalid: ") + e.what());
  }
  if (state.head && (state.head->weight.rows() != state.encoder.output_dim() ||
                     state.head->bias.cols() != state.head->weight.cols())) {
    throw DataError("checkpoint head does not match the encoder");
  }
  if (!tensors.empty()) {
    for (const auto& name : state.parameter_names()) state.momentum.push_back(take("momentum/" + name));
  }
  if (!tensors.empty()) throw DataError("checkpoint has unexpected tensor '" + tensors.begin()->first + "'");
  const auto params = std::as_const(state).parameters();
  for (std::size_t i = 0; i < state.momentum.size(); ++i) {
    if (!state.momentum[i].same_shape(*params[i])) throw DataError("checkpoint momentum shape mismatch");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const TrainState& state, std::string_view config_text) {
  const std::string bytes = serialize_checkpoint(state, config_text);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace vbpc
