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

#include "trtkit/nlos_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>

#include "trtkit/error.hpp"
#include "trtkit/rng.hpp"

namespace trtkit {

void HiddenScene::validate() const {
  for (const ScenePoint& p : points) {
    if (!(p.position[2] > 0.0)) throw RangeError("hidden points must lie at z > 0");
    if (!(p.albedo >= 0.0 && p.albedo <= 1.0)) throw RangeError("albedo outside [0, 1]");
    const double n = std::sqrt(p.normal[0] * p.normal[0] + p.normal[1] * p.normal[1] + p.normal[2] * p.normal[2]);
    if (std::abs(n - 1.0) > 1e-6) throw RangeError("normals must be unit length");
  }
}

void ScanGrid::validate() const {
  if (height < 2 || width < 2) throw ConfigError("scan grid must be at least 2x2");
  if (!(extent > 0.0)) throw ConfigError("wall extent must be positive");
  if (bins < 1) throw ConfigError("bins must be >= 1");
  if (!(bin_width_ps > 0.0)) throw ConfigError("bin width must be positive");
}

TransientCube render_confocal(const HiddenScene& scene, const ScanGrid& grid, const PulseModel& pulse,
                              const ConfocalOptions& options) {
  scene.validate();
  grid.validate();
  pulse.validate();
  TransientCube cube(grid.height, grid.width, grid.bins, grid.bin_width_ps, CubeKind::rates);
  const double bin_m = meters_per_bin(grid.bin_width_ps);
  std::vector<double> impulses(static_cast<size_t>(grid.bins));
  for (int64_t i = 0; i < grid.height; ++i) {
    for (int64_t j = 0; j < grid.width; ++j) {
      std::fill(impulses.begin(), impulses.end(), 0.0);
      const double sx = grid.wall_x(j), sy = grid.wall_y(i);
      bool any = false;
      for (const ScenePoint& p : scene.points) {
        const double dx = sx - p.position[0], dy = sy - p.position[1], dz = -p.position[2];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        const int64_t n = std::llround(r / bin_m);
        if (n >= grid.bins) throw RangeError("hidden point beyond the temporal range");
        const double cosine = (dx * p.normal[0] + dy * p.normal[1] + dz * p.normal[2]) / r;
        if (cosine <= 0.0 || p.albedo == 0.0) continue;
        const double falloff = options.quadratic_falloff ? r * r * r * r : r * r;
        impulses[static_cast<size_t>(n)] += p.albedo * cosine / falloff;
        any = true;
      }
      if (any) convolve_clipped(impulses, pulse.kernel, cube.histogram(i, j));
    }
  }
  return cube;
}

std::pair<IntensityImage, DepthMap> gt_views(const HiddenScene& scene, const ScanGrid& grid) {
  grid.validate();
  IntensityImage intensity(grid.height, grid.width, 0.0);
  DepthMap depth(grid.height, grid.width, DepthUnits::meters);
  std::fill(depth.valid.begin(), depth.valid.end(), 0);
  for (const ScenePoint& p : scene.points) {
    const int64_t col = static_cast<int64_t>(std::floor((p.position[0] + grid.extent / 2.0) / grid.extent * grid.width));
    const int64_t row =
        static_cast<int64_t>(std::floor((p.position[1] + grid.extent / 2.0) / grid.extent * grid.height));
    if (row < 0 || row >= grid.height || col < 0 || col >= grid.width) continue;
    const size_t c = static_cast<size_t>(row * grid.width + col);
    intensity.values[c] = std::max(intensity.values[c], p.albedo);
    if (!depth.valid[c] || p.position[2] < depth.values[c]) depth.values[c] = p.position[2];
    depth.valid[c] = 1;
  }
  return {intensity, depth};
}

HiddenScene procedural_hidden_scene(const ScanGrid& grid, const HiddenSceneOptions& o, uint64_t seed) {
  grid.validate();
  if (o.density < 1) throw ConfigError("density must be >= 1");
  if (!(o.min_depth > 0.0 && o.max_depth >= o.min_depth)) throw ConfigError("invalid hidden depth range");
  std::mt19937_64 rng(stream_key(seed, 0x4E105));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  HiddenScene scene;
  const int shapes = std::uniform_int_distribution<int>(o.min_shapes, std::max(o.min_shapes, o.max_shapes))(rng);
  const int64_t sh = grid.height * o.density, sw = grid.width * o.density;
  std::vector<double> best(static_cast<size_t>(sh * sw), 0.0);
  std::vector<double> albedo(best.size(), 0.0);
  for (int k = 0; k < shapes; ++k) {
    const bool ellipse = unit(rng) < 0.5;
    const double cy = uniform(0.25, 0.75), cx = uniform(0.25, 0.75);
    const double ry = uniform(0.1, 0.25), rx = uniform(0.1, 0.25);
    const double z = uniform(o.min_depth, o.max_depth);
    const double a = uniform(0.5, 1.0);
    for (int64_t i = 0; i < sh; ++i) {
      for (int64_t j = 0; j < sw; ++j) {
        const double dy = ((i + 0.5) / sh - cy) / ry, dx = ((j + 0.5) / sw - cx) / rx;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        const size_t c = static_cast<size_t>(i * sw + j);
        // Nearer shapes occlude farther ones in the front view.
        if (inside && (best[c] == 0.0 || z < best[c])) {
          best[c] = z;
          albedo[c] = a;
        }
      }
    }
  }
  for (int64_t i = 0; i < sh; ++i) {
    for (int64_t j = 0; j < sw; ++j) {
      const size_t c = static_cast<size_t>(i * sw + j);
      if (best[c] == 0.0) continue;
      ScenePoint p;
      p.position = {-grid.extent / 2.0 + (j + 0.5) * grid.extent / sw, -grid.extent / 2.0 + (i + 0.5) * grid.extent / sh,
                    best[c]};
      p.albedo = albedo[c];
      scene.points.push_back(p);
    }
  }
  return scene;
}

HiddenScene load_hidden_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene " + path.string());
  HiddenScene scene;
  try {
    nlohmann::json j;
    in >> j;
    for (const auto& row : j.at("points")) {
      if (row.size() != 7) throw FormatError("scene points need 7 values");
      ScenePoint p;
      p.position = {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()};
      p.albedo = row[3].get<double>();
      p.normal = {row[4].get<double>(), row[5].get<double>(), row[6].get<double>()};
      scene.points.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad scene file " + path.string() + ": " + e.what());
  }
  scene.validate();
  return scene;
}

void save_hidden_scene(const HiddenScene& scene, const std::filesystem::path& path) {
  nlohmann::json pts = nlohmann::json::array();
  for (const ScenePoint& p : scene.points)
    pts.push_back({p.position[0], p.position[1], p.position[2], p.albedo, p.normal[0], p.normal[1], p.normal[2]});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene " + path.string());
  out << nlohmann::json{{"points", pts}}.dump() << '\n';
}

}  // namespace trtkit
