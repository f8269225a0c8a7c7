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

#include "trtkit/scene_gen.hpp"

#include <algorithm>
#include <random>

#include "trtkit/error.hpp"
#include "trtkit/rng.hpp"

namespace trtkit {

SceneLOS procedural_scene(const SceneGenOptions& o, uint64_t seed) {
  if (o.height < 1 || o.width < 1) throw ConfigError("scene size must be positive");
  if (!(o.min_depth > 0.0 && o.max_depth > o.min_depth)) throw ConfigError("invalid scene depth range");
  std::mt19937_64 rng(stream_key(seed, 0x5CE7E));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  SceneLOS s(o.height, o.width);
  const double span = o.max_depth - o.min_depth;
  // Background ramp occupies the far half of the range.
  const double base = uniform(o.min_depth + 0.6 * span, o.min_depth + 0.8 * span);
  const double gx = uniform(-0.15, 0.15) * span, gy = uniform(-0.15, 0.15) * span;
  const double bg_albedo = uniform(o.min_albedo, 1.0);
  for (int64_t h = 0; h < o.height; ++h) {
    for (int64_t w = 0; w < o.width; ++w) {
      const double y = (h + 0.5) / o.height - 0.5, x = (w + 0.5) / o.width - 0.5;
      const size_t p = static_cast<size_t>(h * o.width + w);
      s.depth[p] = std::clamp(base + gx * x + gy * y, o.min_depth, o.max_depth);
      s.albedo[p] = bg_albedo;
    }
  }
  const int shapes = std::uniform_int_distribution<int>(o.min_shapes, std::max(o.min_shapes, o.max_shapes))(rng);
  for (int k = 0; k < shapes; ++k) {
    const bool ellipse = unit(rng) < 0.5;
    const double cy = uniform(0.1, 0.9) * o.height, cx = uniform(0.1, 0.9) * o.width;
    const double ry = uniform(0.1, 0.3) * o.height, rx = uniform(0.1, 0.3) * o.width;
    const double depth = uniform(o.min_depth, o.min_depth + 0.6 * span);
    const double albedo = uniform(o.min_albedo, 1.0);
    for (int64_t h = 0; h < o.height; ++h) {
      for (int64_t w = 0; w < o.width; ++w) {
        const double dy = (h + 0.5 - cy) / ry, dx = (w + 0.5 - cx) / rx;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (!inside) continue;
        const size_t p = static_cast<size_t>(h * o.width + w);
        s.depth[p] = depth;
        s.albedo[p] = albedo;
      }
    }
  }
  return s;
}

SceneGenOptions scene_options_for(int64_t height, int64_t width, int64_t bins, double bin_width_ps) {
  SceneGenOptions o;
  o.height = height;
  o.width = width;
  const double range = static_cast<double>(bins) * meters_per_bin(bin_width_ps);
  o.min_depth = 0.13 * range;
  o.max_depth = 0.85 * range;
  return o;
}

SceneLOS scene_from_depth(const DepthMap& depth, double albedo) {
  depth.validate();
  if (depth.units != DepthUnits::meters) throw ConfigError("scene import expects depth in metres");
  SceneLOS s(depth.height, depth.width);
  for (size_t i = 0; i < depth.values.size(); ++i) {
    s.valid[i] = depth.valid[i] && depth.values[i] > 0.0;
    s.depth[i] = s.valid[i] ? depth.values[i] : 0.0;
    s.albedo[i] = albedo;
  }
  return s;
}

}  // namespace trtkit
