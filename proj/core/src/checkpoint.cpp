// Copyright (c) 2026 The trtkit Authors. All Rights Reserved.
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

#include "trtkit/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'T', 'K'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("checkpoint truncated in " + what);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params, const std::string& model_json,
                     const std::string& meta_json) {
  nlohmann::json header;
  try {
    header["model"] = nlohmann::json::parse(model_json);
    header["meta"] = nlohmann::json::parse(meta_json);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  nlohmann::json entries = nlohmann::json::array();
  int64_t offset = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    const Var& v = params.vars()[i];
    entries.push_back({{"name", params.names()[i]}, {"shape", v.shape()}, {"offset", offset}});
    offset += v.size();
  }
  header["tensors"] = entries;
  const std::string text = header.dump();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out.write(kMagic, 4);
    put<uint32_t>(out, kVersion);
    put<uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    std::vector<float> buf;
    for (const Var& v : params.vars()) {
      buf.resize(static_cast<size_t>(v.size()));
      for (int64_t i = 0; i < v.size(); ++i) buf[static_cast<size_t>(i)] = static_cast<float>(v.value()[i]);
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!out) throw IoError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointData load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("checkpoint truncated in magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad checkpoint magic");
  if (get<uint32_t>(in, "version") != kVersion) throw FormatError("unsupported checkpoint version");
  const uint64_t len = get<uint64_t>(in, "header length");
  if (len > (1ull << 30)) throw FormatError("checkpoint header too large");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw FormatError("checkpoint truncated in header");
  CheckpointData data;
  std::vector<std::pair<std::string, Shape>> layout;
  try {
    const auto header = nlohmann::json::parse(text);
    data.model_json = header.at("model").dump();
    data.meta_json = header.value("meta", nlohmann::json::object()).dump();
    int64_t expected = 0;
    for (const auto& e : header.at("tensors")) {
      if (e.at("offset").get<int64_t>() != expected) throw FormatError("checkpoint tensor offsets are not contiguous");
      Shape s = e.at("shape").get<Shape>();
      for (int64_t d : s)
        if (d < 0) throw FormatError("negative checkpoint dimension");
      expected += numel(s);
      layout.emplace_back(e.at("name").get<std::string>(), std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
  std::vector<float> buf;
  for (auto& [name, shape] : layout) {
    Tensor t(shape);
    buf.resize(static_cast<size_t>(t.size()));
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
      throw FormatError("checkpoint truncated in tensor " + name);
    }
    for (int64_t i = 0; i < t.size(); ++i) t[i] = buf[static_cast<size_t>(i)];
    data.tensors.emplace_back(name, std::move(t));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after checkpoint payload");
  return data;
}

void restore_parameters(const CheckpointData& data, ParameterSet& params) {
  if (data.tensors.size() != params.size()) {
    throw ConfigError("checkpoint holds " + std::to_string(data.tensors.size()) + " tensors, model expects " +
                      std::to_string(params.size()));
  }
  for (const auto& [name, t] : data.tensors) {
    Var v = params.get(name);
    if (v.shape() != t.shape()) {
      throw ShapeError("checkpoint tensor " + name + " has shape " + shape_string(t.shape()) + ", model expects " +
                       shape_string(v.shape()));
    }
    v.mutable_value() = t;
  }
}

}  // namespace trtkit
