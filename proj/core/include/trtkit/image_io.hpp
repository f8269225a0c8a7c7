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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trtkit/transient.hpp"

namespace trtkit {

/// Linear mapping between 16-bit codes and physical values, stored in a
/// JSON sidecar next to each PNG.
struct PngScaling {
  double min = 0.0;
  double max = 1.0;
  std::string units;
  /// Code reserved for masked pixels, or -1 when every code is a value.
  int invalid_code = -1;
};

struct Gray16 {
  int64_t height = 0, width = 0;
  std::vector<uint16_t> pixels;
};

void write_png16(const std::filesystem::path& path, const Gray16& image);
/// Reads 8- or 16-bit grayscale PNGs; 8-bit codes are widened by 257.
Gray16 read_png16(const std::filesystem::path& path);

/// "depth.png" -> "depth.json".
std::filesystem::path sidecar_path(const std::filesystem::path& png);
void write_sidecar(const std::filesystem::path& png, const PngScaling& s);
PngScaling read_sidecar(const std::filesystem::path& png);

/// Valid depths map linearly onto codes 1..65535; code 0 marks masked pixels.
void save_depth_png(const DepthMap& depth, const std::filesystem::path& path);
/// Loads a depth PNG. Without a sidecar the file is treated as a generic
/// 16-bit depth image: depth = code * fallback_meters_per_code, 0 = invalid.
DepthMap load_depth_png(const std::filesystem::path& path, double fallback_meters_per_code = 1e-3);

void save_intensity_png(const IntensityImage& image, const std::filesystem::path& path);
IntensityImage load_intensity_png(const std::filesystem::path& path);

}  // namespace trtkit
