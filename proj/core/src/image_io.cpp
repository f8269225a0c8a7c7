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

#include "trtkit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

void write_png16(const std::filesystem::path& path, const Gray16& image) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(static_cast<size_t>(image.width) * 2);
  for (int64_t i = 0; i < image.height; ++i) {
    for (int64_t j = 0; j < image.width; ++j) {
      const uint16_t v = image.pixels[static_cast<size_t>(i * image.width + j)];
      row[2 * j] = static_cast<unsigned char>(v >> 8);
      row[2 * j + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Gray16 read_png16(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("libpng failed reading " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_png(png, info, PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_PACKING, nullptr);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": expected an 8- or 16-bit grayscale PNG");
  }
  Gray16 out;
  out.height = png_get_image_height(png, info);
  out.width = png_get_image_width(png, info);
  out.pixels.resize(static_cast<size_t>(out.height * out.width));
  png_bytepp rows = png_get_rows(png, info);
  for (int64_t i = 0; i < out.height; ++i) {
    for (int64_t j = 0; j < out.width; ++j) {
      uint16_t v = depth == 16 ? static_cast<uint16_t>((rows[i][2 * j] << 8) | rows[i][2 * j + 1])
                               : static_cast<uint16_t>(rows[i][j] * 257);
      out.pixels[static_cast<size_t>(i * out.width + j)] = v;
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& png) {
  std::filesystem::path p = png;
  p.replace_extension(".json");
  return p;
}

void write_sidecar(const std::filesystem::path& png, const PngScaling& s) {
  nlohmann::json j{{"min", s.min}, {"max", s.max}, {"units", s.units}};
  if (s.invalid_code >= 0) j["invalid_code"] = s.invalid_code;
  std::ofstream out(sidecar_path(png));
  if (!out) throw IoError("cannot write sidecar for " + png.string());
  out << j.dump(2) << '\n';
}

PngScaling read_sidecar(const std::filesystem::path& png) {
  std::ifstream in(sidecar_path(png));
  if (!in) throw IoError("missing sidecar for " + png.string());
  nlohmann::json j;
  try {
    in >> j;
    PngScaling s;
    s.min = j.at("min").get<double>();
    s.max = j.at("max").get<double>();
    s.units = j.at("units").get<std::string>();
    s.invalid_code = j.value("invalid_code", -1);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad sidecar for " + png.string() + ": " + e.what());
  }
}

void save_depth_png(const DepthMap& depth, const std::filesystem::path& path) {
  depth.validate();
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (size_t i = 0; i < depth.values.size(); ++i) {
    if (!depth.valid[i]) continue;
    lo = any ? std::min(lo, depth.values[i]) : depth.values[i];
    hi = any ? std::max(hi, depth.values[i]) : depth.values[i];
    any = true;
  }
  Gray16 img{depth.height, depth.width, std::vector<uint16_t>(depth.values.size(), 0)};
  const double span = hi - lo;
  for (size_t i = 0; i < depth.values.size(); ++i) {
    if (!depth.valid[i]) continue;
    const double u = span > 0.0 ? (depth.values[i] - lo) / span : 0.0;
    img.pixels[i] = static_cast<uint16_t>(1 + std::lround(u * 65534.0));
  }
  write_png16(path, img);
  write_sidecar(path, {lo, hi, units_name(depth.units), 0});
}

DepthMap load_depth_png(const std::filesystem::path& path, double fallback_meters_per_code) {
  const Gray16 img = read_png16(path);
  DepthMap d(img.height, img.width);
  if (std::filesystem::exists(sidecar_path(path))) {
    const PngScaling s = read_sidecar(path);
    d.units = parse_units(s.units);
    const bool reserved = s.invalid_code >= 0;
    for (size_t i = 0; i < img.pixels.size(); ++i) {
      const uint16_t code = img.pixels[i];
      if (reserved && code == s.invalid_code) {
        d.valid[i] = 0;
        d.values[i] = 0.0;
        continue;
      }
      const double u = reserved ? (code - 1) / 65534.0 : code / 65535.0;
      d.values[i] = s.min + u * (s.max - s.min);
    }
  } else {
    for (size_t i = 0; i < img.pixels.size(); ++i) {
      d.values[i] = img.pixels[i] * fallback_meters_per_code;
      d.valid[i] = img.pixels[i] != 0 ? 1 : 0;
    }
  }
  return d;
}

void save_intensity_png(const IntensityImage& image, const std::filesystem::path& path) {
  double lo = 0.0, hi = image.max();
  for (double v : image.values) lo = std::min(lo, v);
  Gray16 img{image.height, image.width, std::vector<uint16_t>(image.values.size(), 0)};
  const double span = hi - lo;
  for (size_t i = 0; i < image.values.size(); ++i) {
    const double u = span > 0.0 ? (image.values[i] - lo) / span : 0.0;
    img.pixels[i] = static_cast<uint16_t>(std::lround(u * 65535.0));
  }
  write_png16(path, img);
  write_sidecar(path, {lo, hi, "intensity", -1});
}

IntensityImage load_intensity_png(const std::filesystem::path& path) {
  const Gray16 img = read_png16(path);
  IntensityImage out(img.height, img.width);
  PngScaling s{0.0, 1.0, "intensity", -1};
  if (std::filesystem::exists(sidecar_path(path))) s = read_sidecar(path);
  for (size_t i = 0; i < img.pixels.size(); ++i) out.values[i] = s.min + img.pixels[i] / 65535.0 * (s.max - s.min);
  return out;
}

}  // namespace trtkit
