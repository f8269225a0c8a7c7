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

#include "trtkit/los_sim.hpp"
#include "trtkit/nlos_sim.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

/// Photon budget "signal:background", both as mean photons per pixel.
struct SbrLevel {
  double signal = 2.0;
  double background = 2.0;
  std::string label() const;
  /// Table grouping key by background level, e.g. "X:10" or "Y:100".
  std::string group() const;
  bool operator==(const SbrLevel&) const = default;
};

SbrLevel parse_sbr(const std::string& text);
/// Comma-separated list, e.g. "10:2,5:2".
std::vector<SbrLevel> parse_sbr_list(const std::string& text);
/// {10, 5, 2} x {2, 10, 50} plus {3, 2, 1}:100.
std::vector<SbrLevel> standard_sbr_grid();

struct LosDatasetOptions {
  int64_t count = 4;
  std::vector<SbrLevel> grid{{2.0, 2.0}};
  int64_t height = 32, width = 32, bins = 128;
  double bin_width_ps = 80.0;
  double pulse_fwhm_ps = 400.0;
  double jitter_fwhm_ps = 0.0;
  uint64_t seed = 0;
  int threads = 1;
  /// Optional directory of depth PNGs used instead of procedural scenes.
  std::filesystem::path import_dir;
};

struct LosSample {
  TransientCube cube;  // counts
  DepthMap depth;      // metres
  SbrLevel sbr;
  uint64_t seed = 0;
  double pulse_fwhm_ps = 400.0;
  std::string label() const { return sbr.label(); }
};

/// Sample `index` of a dataset: scene, SBR level (round-robin over the grid)
/// and noise all derive from (seed, index).
LosSample simulate_los_sample(const LosDatasetOptions& options, int64_t index);

/// Writes cube_XXXX.trtc, depth_XXXX.png (+ sidecar) and manifest.json.
void generate_los_dataset(const LosDatasetOptions& options, const std::filesystem::path& out_dir);
std::vector<LosSample> load_los_dataset(const std::filesystem::path& dir);

struct NlosDatasetOptions {
  int64_t count = 1;
  std::vector<SbrLevel> grid{{200.0, 10.0}};
  ScanGrid scan{16, 16, 1.0, 64, 264.0};
  double pulse_fwhm_ps = 300.0;
  HiddenSceneOptions scene;
  bool quadratic_falloff = false;
  uint64_t seed = 0;
  /// Optional fixed scene replacing the procedural generator.
  std::filesystem::path scene_file;
};

struct NlosSample {
  TransientCube cube;   // counts
  TransientCube clean;  // expected signal counts, no background
  IntensityImage intensity;
  DepthMap depth;  // metres
  SbrLevel sbr;
  uint64_t seed = 0;
  double wall_extent = 1.0;
  std::string label() const { return sbr.label(); }
};

NlosSample simulate_nlos_sample(const NlosDatasetOptions& options, int64_t index);
/// Writes cube/clean cubes, intensity and depth PNGs and manifest.json.
void generate_nlos_dataset(const NlosDatasetOptions& options, const std::filesystem::path& out_dir);
std::vector<NlosSample> load_nlos_dataset(const std::filesystem::path& dir);

}  // namespace trtkit
