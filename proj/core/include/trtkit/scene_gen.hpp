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

#include "trtkit/los_sim.hpp"

namespace trtkit {

struct SceneGenOptions {
  int64_t height = 32;
  int64_t width = 32;
  double min_depth = 0.2;  // metres
  double max_depth = 1.3;
  int min_shapes = 2;
  int max_shapes = 5;
  double min_albedo = 0.3;
};

/// Random scene: a tilted background ramp overlaid with rectangles and
/// ellipses at nearer depths, each with its own albedo.
SceneLOS procedural_scene(const SceneGenOptions& options, uint64_t seed);

/// Depth range that keeps the pulse inside a histogram of `bins` bins.
SceneGenOptions scene_options_for(int64_t height, int64_t width, int64_t bins, double bin_width_ps);

/// Scene from an imported depth map (metres) with constant albedo.
SceneLOS scene_from_depth(const DepthMap& depth, double albedo = 1.0);

}  // namespace trtkit
