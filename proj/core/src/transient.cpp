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

#include "trtkit/transient.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'T', 'C'};
constexpr uint16_t kVersion = 1;
constexpr size_t kHeaderBytes = 28;

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  using U = std::conditional_t<sizeof(T) == 8, uint64_t,
                               std::conditional_t<sizeof(T) == 4, uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, uint16_t, uint8_t>>>;
  const U bits = std::bit_cast<U>(value);
  for (size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, uint64_t,
                               std::conditional_t<sizeof(T) == 4, uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, uint16_t, uint8_t>>>;
  U bits = 0;
  for (size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

void check_dims(int64_t h, int64_t w, int64_t t) {
  if (h < 1 || w < 1 || t < 1) throw ShapeError("transient cube dimensions must be >= 1");
}

}  // namespace

TransientCube::TransientCube(int64_t height, int64_t width, int64_t bins, double bin_width_ps, CubeKind kind)
    : height_(height), width_(width), bins_(bins), bin_width_ps_(bin_width_ps), kind_(kind) {
  check_dims(height, width, bins);
  if (!(bin_width_ps > 0.0)) throw ConfigError("bin width must be positive");
  values_.assign(static_cast<size_t>(height * width * bins), 0.0);
}

TransientCube::TransientCube(const Tensor& values, double bin_width_ps, CubeKind kind)
    : TransientCube(values.rank() == 3 ? values.dim(0) : 0, values.rank() == 3 ? values.dim(1) : 0,
                    values.rank() == 3 ? values.dim(2) : 0, bin_width_ps, kind) {
  std::copy(values.values().begin(), values.values().end(), values_.begin());
}

Tensor TransientCube::to_tensor() const { return Tensor({height_, width_, bins_}, values_); }

void TransientCube::validate() const {
  check_dims(height_, width_, bins_);
  if (!(bin_width_ps_ > 0.0)) throw ConfigError("bin width must be positive");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericalError("transient cube holds a negative or non-finite value");
    if (kind_ == CubeKind::counts && v != std::floor(v)) throw NumericalError("count cube holds a non-integral value");
  }
}

void save_cube(const TransientCube& cube, const std::filesystem::path& path) {
  cube.validate();
  std::vector<unsigned char> buf;
  buf.reserve(kHeaderBytes + cube.values().size() * 4);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put_le<uint16_t>(buf, kVersion);
  put_le<uint8_t>(buf, static_cast<uint8_t>(cube.kind()));
  put_le<uint8_t>(buf, 0);
  for (int64_t d : {cube.height(), cube.width(), cube.bins()}) {
    if (d > std::numeric_limits<uint32_t>::max()) throw ShapeError("cube dimension exceeds u32");
    put_le<uint32_t>(buf, static_cast<uint32_t>(d));
  }
  put_le<double>(buf, cube.bin_width_ps());
  for (double v : cube.values()) {
    if (cube.kind() == CubeKind::counts) {
      if (v > std::numeric_limits<uint32_t>::max()) throw NumericalError("count exceeds u32 range");
      put_le<uint32_t>(buf, static_cast<uint32_t>(v));
    } else {
      put_le<float>(buf, static_cast<float>(v));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

TransientCube load_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0) throw FormatError("bad magic in " + path.string());
  if (buf.size() < kHeaderBytes) throw FormatError("truncated header in " + path.string());
  const unsigned char* p = buf.data();
  const auto version = get_le<uint16_t>(p + 4);
  if (version != kVersion) throw FormatError("unsupported cube version " + std::to_string(version));
  const auto kind = get_le<uint8_t>(p + 6);
  if (kind > 1) throw FormatError("unknown cube kind " + std::to_string(kind));
  if (get_le<uint8_t>(p + 7) != 0) throw FormatError("reserved header byte is nonzero");
  const uint64_t h = get_le<uint32_t>(p + 8), w = get_le<uint32_t>(p + 12), t = get_le<uint32_t>(p + 16);
  const double bw = get_le<double>(p + 20);
  if (h == 0 || w == 0 || t == 0) throw FormatError("zero cube dimension");
  // h, w, t < 2^32 each; guard the product against 64-bit overflow.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() / 4;
  if (h > limit / w || h * w > limit / t) throw FormatError("cube dimensions overflow");
  const uint64_t count = h * w * t;
  if (buf.size() - kHeaderBytes < count * 4) throw FormatError("truncated payload in " + path.string());
  if (buf.size() - kHeaderBytes != count * 4) throw FormatError("trailing bytes after payload in " + path.string());
  TransientCube cube(static_cast<int64_t>(h), static_cast<int64_t>(w), static_cast<int64_t>(t), bw,
                     static_cast<CubeKind>(kind));
  auto values = cube.values();
  const unsigned char* payload = p + kHeaderBytes;
  for (uint64_t i = 0; i < count; ++i) {
    values[i] = kind == 0 ? static_cast<double>(get_le<uint32_t>(payload + 4 * i))
                          : static_cast<double>(get_le<float>(payload + 4 * i));
  }
  return cube;
}

const char* units_name(DepthUnits u) { return u == DepthUnits::meters ? "meters" : "bins"; }

DepthUnits parse_units(const std::string& s) {
  if (s == "meters" || s == "m") return DepthUnits::meters;
  if (s == "bins") return DepthUnits::bins;
  throw FormatError("unknown depth units '" + s + "'");
}

DepthMap::DepthMap(int64_t h, int64_t w, DepthUnits u)
    : height(h), width(w), units(u), values(static_cast<size_t>(h * w), 0.0), valid(static_cast<size_t>(h * w), 1) {
  if (h < 1 || w < 1) throw ShapeError("depth map dimensions must be >= 1");
}

int64_t DepthMap::valid_count() const { return std::count_if(valid.begin(), valid.end(), [](uint8_t v) { return v != 0; }); }

Tensor DepthMap::to_tensor() const { return Tensor({height, width}, values); }

Tensor DepthMap::mask_tensor() const {
  Tensor m({height, width});
  for (size_t i = 0; i < valid.size(); ++i) m[static_cast<int64_t>(i)] = valid[i] ? 1.0 : 0.0;
  return m;
}

void DepthMap::validate() const {
  if (values.size() != static_cast<size_t>(height * width) || valid.size() != values.size()) {
    throw ShapeError("depth map mask and value shapes differ");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (valid[i] && !std::isfinite(values[i])) throw NumericalError("non-finite depth on a valid pixel");
  }
}

IntensityImage::IntensityImage(int64_t h, int64_t w, double fill)
    : height(h), width(w), values(static_cast<size_t>(h * w), fill) {
  if (h < 1 || w < 1) throw ShapeError("intensity image dimensions must be >= 1");
}

double IntensityImage::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

Tensor IntensityImage::to_tensor() const { return Tensor({height, width}, values); }

void IntensityImage::validate() const {
  if (values.size() != static_cast<size_t>(height * width)) throw ShapeError("intensity image size mismatch");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericalError("intensity must be finite and nonnegative");
  }
}

DepthMap depth_from_argmax(const TransientCube& cube) {
  if (cube.bins() < 1) throw ShapeError("cube has no bins");
  DepthMap d(cube.height(), cube.width(), DepthUnits::meters);
  const double scale = meters_per_bin(cube.bin_width_ps());
  for (int64_t h = 0; h < cube.height(); ++h) {
    for (int64_t w = 0; w < cube.width(); ++w) {
      auto hist = cube.histogram(h, w);
      const auto it = std::max_element(hist.begin(), hist.end());
      const auto idx = static_cast<int64_t>(it - hist.begin());
      d.at(h, w) = static_cast<double>(idx) * scale;
      d.valid[static_cast<size_t>(h * d.width + w)] = *it > 0.0 ? 1 : 0;
    }
  }
  return d;
}

DepthMap depth_to_meters(const DepthMap& bins, double bin_width_ps) {
  if (bins.units == DepthUnits::meters) return bins;
  DepthMap out = bins;
  out.units = DepthUnits::meters;
  const double s = meters_per_bin(bin_width_ps);
  for (double& v : out.values) v *= s;
  return out;
}

DepthMap depth_to_bins(const DepthMap& meters, double bin_width_ps) {
  if (meters.units == DepthUnits::bins) return meters;
  DepthMap out = meters;
  out.units = DepthUnits::bins;
  const double s = meters_per_bin(bin_width_ps);
  for (double& v : out.values) v /= s;
  return out;
}

}  // namespace trtkit
