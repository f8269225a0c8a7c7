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

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "trtkit/pulse.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

struct ScenePoint {
  std::array<double, 3> position{};  // metres; relay wall at z = 0
  double albedo = 1.0;
  std::array<double, 3> normal{0.0, 0.0, -1.0};
};

/// Hidden scene as an oriented point set behind the relay wall.
struct HiddenScene {
  std::vector<ScenePoint> points;
  void validate() const;
};

/// Confocal scan: an H x W grid of wall points centred on the origin.
struct ScanGrid {
  int64_t height = 32;
  int64_t width = 32;
  double extent = 1.0;  // metres, side of the scanned square
  int64_t bins = 128;
  double bin_width_ps = 132.0;

  double wall_x(int64_t col) const { return -extent / 2.0 + (col + 0.5) * extent / width; }
  double wall_y(int64_t row) const { return -extent / 2.0 + (row + 0.5) * extent / height; }
  void validate() const;
};

struct ConfocalOptions {
  /// Divide by r^4 instead of r_l * r = r^2.
  bool quadratic_falloff = false;
};

/// Lambertian single-bounce confocal transient. Each point adds
/// albedo * max(0, cos) / (r_l * r) at bin round(2r / (c dt)), where cos is
/// between the point normal and the direction back to the wall sample; the
/// result is blurred by the pulse.
TransientCube render_confocal(const HiddenScene& scene, const ScanGrid& grid, const PulseModel& pulse,
                              const ConfocalOptions& options = {});

/// Orthographic front view on the scan grid: per cell the largest albedo and
/// the nearest depth of the points projecting there. Empty cells are masked.
std::pair<IntensityImage, DepthMap> gt_views(const HiddenScene& scene, const ScanGrid& grid);

struct HiddenSceneOptions {
  double min_depth = 0.4;
  double max_depth = 0.9;
  int min_shapes = 1;
  int max_shapes = 3;
  /// Point samples per wall cell along each axis.
  int density = 2;
};

/// Random planar rectangles and ellipses facing the wall.
HiddenScene procedural_hidden_scene(const ScanGrid& grid, const HiddenSceneOptions& options, uint64_t seed);

/// JSON {"points": [[x, y, z, albedo, nx, ny, nz], ...]}.
HiddenScene load_hidden_scene(const std::filesystem::path& path);
void save_hidden_scene(const HiddenScene& scene, const std::filesystem::path& path);

}  // namespace trtkit
