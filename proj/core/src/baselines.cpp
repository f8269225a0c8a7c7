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

#include "trtkit/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace trtkit {

std::vector<double> log_matched_scores(std::span<const double> h, const std::vector<double>& kernel, double eps) {
  const int64_t n = static_cast<int64_t>(h.size());
  const int64_t half = static_cast<int64_t>(kernel.size() / 2);
  // Bins outside the pulse support weigh log(eps); only the excess over that
  // floor needs the windowed sum.
  const double floor = std::log(eps);
  std::vector<double> excess(kernel.size());
  for (size_t k = 0; k < kernel.size(); ++k) excess[k] = std::log(kernel[k] + eps) - floor;
  double total = 0.0;
  for (double v : h) total += v;
  std::vector<double> score(h.size(), total * floor);
  for (int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int64_t k = 0; k < static_cast<int64_t>(kernel.size()); ++k) {
      int64_t j = (i + k - half) % n;
      if (j < 0) j += n;
      s += h[static_cast<size_t>(j)] * excess[static_cast<size_t>(k)];
    }
    score[static_cast<size_t>(i)] += s;
  }
  return score;
}

DepthMap log_matched_filter(const TransientCube& cube, const PulseModel& pulse, double eps) {
  pulse.validate();
  DepthMap d(cube.height(), cube.width(), DepthUnits::meters);
  const double bin_m = meters_per_bin(cube.bin_width_ps());
  for (int64_t h = 0; h < cube.height(); ++h) {
    for (int64_t w = 0; w < cube.width(); ++w) {
      const auto hist = cube.histogram(h, w);
      const auto [lo, hi] = std::minmax_element(hist.begin(), hist.end());
      const size_t p = static_cast<size_t>(h * cube.width() + w);
      if (*hi == *lo) {
        d.values[p] = 0.0;
        d.valid[p] = 0;
        continue;
      }
      const std::vector<double> s = log_matched_scores(hist, pulse.kernel, eps);
      const auto best = std::max_element(s.begin(), s.end()) - s.begin();
      d.values[p] = static_cast<double>(best) * bin_m;
    }
  }
  return d;
}

DepthMap raw_argmax(const TransientCube& cube) { return depth_from_argmax(cube); }

}  // namespace trtkit
