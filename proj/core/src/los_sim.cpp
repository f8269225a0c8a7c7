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

#include "trtkit/los_sim.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "trtkit/error.hpp"
#include "trtkit/rng.hpp"

namespace trtkit {

SceneLOS::SceneLOS(int64_t h, int64_t w)
    : height(h),
      width(w),
      depth(static_cast<size_t>(h * w), 0.0),
      albedo(static_cast<size_t>(h * w), 1.0),
      valid(static_cast<size_t>(h * w), 1) {}

DepthMap SceneLOS::depth_map() const {
  DepthMap d(height, width, DepthUnits::meters);
  d.values = depth;
  d.valid = valid;
  for (size_t i = 0; i < depth.size(); ++i)
    if (!valid[i]) d.values[i] = 0.0;
  return d;
}

void SceneLOS::validate() const {
  const size_t n = static_cast<size_t>(height * width);
  if (height < 1 || width < 1) throw ShapeError("scene must be nonempty");
  if (depth.size() != n || albedo.size() != n || valid.size() != n) throw ShapeError("scene buffers mismatch");
  for (size_t i = 0; i < n; ++i) {
    if (!(albedo[i] >= 0.0 && albedo[i] <= 1.0)) throw RangeError("albedo outside [0, 1]");
    if (valid[i] && !(depth[i] > 0.0 && std::isfinite(depth[i]))) throw RangeError("depth must be positive");
  }
}

void DetectionModel::validate(int64_t pixels) const {
  if (cycles < 1) throw ConfigError("cycles must be >= 1");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("quantum efficiency must lie in (0, 1]");
  if (!(background >= 0.0) || !std::isfinite(background)) throw ConfigError("background must be >= 0");
  if (!attenuation.empty()) {
    if (static_cast<int64_t>(attenuation.size()) != pixels) throw ShapeError("attenuation map size mismatch");
    for (double a : attenuation)
      if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("attenuation must be >= 0");
  }
}

TransientCube ideal_transient(const SceneLOS& scene, const PulseModel& pulse, int64_t bins, double bin_width_ps) {
  scene.validate();
  pulse.validate();
  if (bins < 1) throw ConfigError("bins must be >= 1");
  TransientCube cube(scene.height, scene.width, bins, bin_width_ps, CubeKind::rates);
  const double bin_m = meters_per_bin(bin_width_ps);
  std::vector<double> delta(static_cast<size_t>(bins));
  for (int64_t h = 0; h < scene.height; ++h) {
    for (int64_t w = 0; w < scene.width; ++w) {
      const size_t p = static_cast<size_t>(h * scene.width + w);
      if (!scene.valid[p] || scene.albedo[p] == 0.0) continue;
      const int64_t n = std::llround(scene.depth[p] / bin_m);
      if (n < 0 || n >= bins) throw RangeError("depth " + std::to_string(scene.depth[p]) + " m exceeds histogram range");
      std::fill(delta.begin(), delta.end(), 0.0);
      delta[static_cast<size_t>(n)] = scene.albedo[p];
      convolve_clipped(delta, pulse.kernel, cube.histogram(h, w));
    }
  }
  return cube;
}

TransientCube poisson_detect(const TransientCube& rates, const DetectionModel& det, uint64_t seed, int threads) {
  if (rates.kind() != CubeKind::rates) throw ConfigError("poisson_detect expects a rates cube");
  det.validate(rates.pixels());
  TransientCube out(rates.height(), rates.width(), rates.bins(), rates.bin_width_ps(), CubeKind::counts);
  const double gain = static_cast<double>(det.cycles) * det.efficiency;
  auto work = [&](int64_t first, int64_t last) {
    for (int64_t p = first; p < last; ++p) {
      const int64_t h = p / rates.width(), w = p % rates.width();
      const double a = gain * det.attenuation_at(p);
      const auto in = rates.histogram(h, w);
      auto dst = out.histogram(h, w);
      for (int64_t n = 0; n < rates.bins(); ++n) {
        const double lambda = a * in[static_cast<size_t>(n)] + det.background;
        if (lambda <= 0.0) continue;
        CounterRng rng(stream_key(seed, static_cast<uint64_t>(h), static_cast<uint64_t>(w), static_cast<uint64_t>(n)));
        std::poisson_distribution<long long> dist(lambda);
        dst[static_cast<size_t>(n)] = static_cast<double>(dist(rng));
      }
    }
  };
  const int64_t pixels = rates.pixels();
  const int64_t nthreads = std::max<int64_t>(1, std::min<int64_t>(threads, pixels));
  if (nthreads == 1) {
    work(0, pixels);
  } else {
    std::vector<std::thread> pool;
    for (int64_t t = 0; t < nthreads; ++t) pool.emplace_back(work, pixels * t / nthreads, pixels * (t + 1) / nthreads);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<double> expected_signal(const TransientCube& rates, const DetectionModel& det) {
  std::vector<double> s(static_cast<size_t>(rates.pixels()), 0.0);
  const double gain = static_cast<double>(det.cycles) * det.efficiency;
  for (int64_t p = 0; p < rates.pixels(); ++p) {
    double mass = 0.0;
    for (double v : rates.histogram(p / rates.width(), p % rates.width())) mass += v;
    s[static_cast<size_t>(p)] = gain * det.attenuation_at(p) * mass;
  }
  return s;
}

DetectionModel calibrate_sbr(const TransientCube& rates, const DetectionModel& base, double signal_photons,
                             double background_photons, const std::vector<uint8_t>& valid) {
  base.validate(rates.pixels());
  if (!(signal_photons >= 0.0) || !(background_photons >= 0.0)) throw ConfigError("photon budgets must be >= 0");
  if (!valid.empty() && static_cast<int64_t>(valid.size()) != rates.pixels()) throw ShapeError("mask size mismatch");
  const std::vector<double> s = expected_signal(rates, base);
  double total = 0.0;
  int64_t count = 0;
  for (size_t p = 0; p < s.size(); ++p) {
    if (!valid.empty() && !valid[p]) continue;
    total += s[p];
    ++count;
  }
  if (count == 0 || !(total > 0.0)) throw NumericalError("rates have zero signal mass");
  const double k = signal_photons / (total / static_cast<double>(count));
  DetectionModel det = base;
  det.attenuation.assign(static_cast<size_t>(rates.pixels()), 0.0);
  for (int64_t p = 0; p < rates.pixels(); ++p) det.attenuation[static_cast<size_t>(p)] = base.attenuation_at(p) * k;
  det.background = background_photons / static_cast<double>(rates.bins());
  return det;
}

}  // namespace trtkit
