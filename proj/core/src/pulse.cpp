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

#include "trtkit/pulse.hpp"

#include <cmath>
#include <numeric>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

void check_kernel(const std::vector<double>& k, const char* what) {
  if (k.empty() || k.size() % 2 == 0) throw ConfigError(std::string(what) + " kernel must have odd length");
  double s = 0.0;
  for (double v : k) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " kernel must be nonnegative");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ConfigError(std::string(what) + " kernel must sum to 1");
}

std::vector<double> normalized(std::vector<double> k) {
  const double s = std::accumulate(k.begin(), k.end(), 0.0);
  if (!(s > 0.0)) throw ConfigError("kernel has zero mass");
  for (double& v : k) v /= s;
  return k;
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma_bins) {
  if (!(sigma_bins >= 0.0)) throw ConfigError("negative pulse width");
  const int64_t half = static_cast<int64_t>(std::ceil(4.0 * sigma_bins));
  if (half == 0) return {1.0};
  std::vector<double> k(static_cast<size_t>(2 * half + 1));
  for (int64_t i = -half; i <= half; ++i) {
    k[static_cast<size_t>(i + half)] = std::exp(-0.5 * (i / sigma_bins) * (i / sigma_bins));
  }
  return normalized(std::move(k));
}

std::vector<double> convolve_kernels(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

void convolve_clipped(std::span<const double> in, const std::vector<double>& kernel, std::span<double> out) {
  const int64_t n = static_cast<int64_t>(in.size());
  const int64_t half = static_cast<int64_t>(kernel.size() / 2);
  for (int64_t src = 0; src < n; ++src) {
    const double v = in[static_cast<size_t>(src)];
    if (v == 0.0) continue;
    for (int64_t k = 0; k < static_cast<int64_t>(kernel.size()); ++k) {
      const int64_t dst = src + k - half;
      if (dst >= 0 && dst < n) out[static_cast<size_t>(dst)] += v * kernel[static_cast<size_t>(k)];
    }
  }
}

PulseModel PulseModel::gaussian(double fwhm_ps, double bin_width_ps, double jitter_fwhm_ps) {
  if (!(bin_width_ps > 0.0)) throw ConfigError("bin width must be positive");
  if (!(fwhm_ps >= 0.0) || !(jitter_fwhm_ps >= 0.0)) throw ConfigError("pulse FWHM must be nonnegative");
  return from_kernels(gaussian_kernel(fwhm_ps * kFwhmToSigma / bin_width_ps),
                      gaussian_kernel(jitter_fwhm_ps * kFwhmToSigma / bin_width_ps));
}

PulseModel PulseModel::from_kernels(std::vector<double> shape, std::vector<double> jitter) {
  PulseModel p;
  p.shape = std::move(shape);
  p.jitter = std::move(jitter);
  check_kernel(p.shape, "pulse");
  check_kernel(p.jitter, "jitter");
  p.kernel = convolve_kernels(p.shape, p.jitter);
  return p;
}

void PulseModel::validate() const {
  check_kernel(shape, "pulse");
  check_kernel(jitter, "jitter");
  check_kernel(kernel, "combined");
}

}  // namespace trtkit
