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
#include <vector>

#include "trtkit/pulse.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

/// Line-of-sight scene: per-pixel depth (metres) and albedo in [0, 1].
struct SceneLOS {
  int64_t height = 0, width = 0;
  std::vector<double> depth;
  std::vector<double> albedo;
  std::vector<uint8_t> valid;

  SceneLOS() = default;
  SceneLOS(int64_t h, int64_t w);

  DepthMap depth_map() const;
  void validate() const;
};

/// Photon detection parameters. Expected counts per bin are
/// cycles * efficiency * attenuation[h, w] * rate + background.
struct DetectionModel {
  int64_t cycles = 1;
  double efficiency = 1.0;
  /// Per-pixel attenuation; empty means 1 everywhere.
  std::vector<double> attenuation;
  /// Expected background counts per bin over the full dwell.
  double background = 0.0;

  double attenuation_at(int64_t pixel) const {
    return attenuation.empty() ? 1.0 : attenuation[static_cast<size_t>(pixel)];
  }
  void validate(int64_t pixels) const;
};

/// Noise-free arrival rates: a delta at round(2z / (c dt)) blurred by the
/// pulse and scaled by albedo. Invalid pixels stay zero.
TransientCube ideal_transient(const SceneLOS& scene, const PulseModel& pulse, int64_t bins, double bin_width_ps);

/// Poisson photon counts. Each voxel draws from its own counter-based stream
/// keyed by (seed, h, w, n), so the output does not depend on `threads`.
TransientCube poisson_detect(const TransientCube& rates, const DetectionModel& det, uint64_t seed, int threads = 1);

/// Expected signal photons per pixel, cycles * efficiency * attenuation * sum(rates).
std::vector<double> expected_signal(const TransientCube& rates, const DetectionModel& det);

/// Rescales attenuation so the mean expected signal over `valid` pixels
/// (all pixels when empty) equals `signal_photons`, and sets the per-bin
/// background so background * T equals `background_photons`.
DetectionModel calibrate_sbr(const TransientCube& rates, const DetectionModel& base, double signal_photons,
                             double background_photons, const std::vector<uint8_t>& valid = {});

}  // namespace trtkit
