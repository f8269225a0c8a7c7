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
#include <span>
#include <vector>

namespace trtkit {

/// Sampled laser pulse g and timing jitter j, each of unit area, with the
/// combined kernel g * j. Kernels have odd length and are centred.
struct PulseModel {
  std::vector<double> shape;
  std::vector<double> jitter{1.0};
  std::vector<double> kernel;

  /// Gaussian pulse of the given FWHM sampled at the bin width and truncated
  /// at +-4 sigma. A jitter FWHM of 0 is a delta.
  static PulseModel gaussian(double fwhm_ps, double bin_width_ps, double jitter_fwhm_ps = 0.0);
  static PulseModel from_kernels(std::vector<double> shape, std::vector<double> jitter = {1.0});

  int64_t half_width() const { return static_cast<int64_t>(kernel.size() / 2); }
  void validate() const;
};

/// Unit-area Gaussian samples, truncated at +-4 sigma (sigma in bins).
std::vector<double> gaussian_kernel(double sigma_bins);
/// Full linear convolution of two kernels.
std::vector<double> convolve_kernels(const std::vector<double>& a, const std::vector<double>& b);
/// out[n] += sum_k in[n - k + half] * kernel[k]. Mass past either end is
/// dropped.
void convolve_clipped(std::span<const double> in, const std::vector<double>& kernel, std::span<double> out);

}  // namespace trtkit
