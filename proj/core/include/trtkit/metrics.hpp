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

#include "trtkit/transient.hpp"

namespace trtkit {

/// Half-open pixel rectangle [row0, row1) x [col0, col1).
struct Rect {
  int64_t row0 = 0, row1 = 0, col0 = 0, col1 = 0;
  int64_t rows() const { return row1 - row0; }
  int64_t cols() const { return col1 - col0; }
  bool operator==(const Rect&) const = default;
};

struct MetricsReport {
  double rmse = 0.0;
  double mad = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  Rect crop_region;
};

inline constexpr double kPsnrCap = 99.0;

/// Root mean squared depth error over gt.valid.
double rmse(const DepthMap& d, const DepthMap& gt);
/// Mean absolute depth error over gt.valid.
double mad(const DepthMap& d, const DepthMap& gt);
/// 10 log10(peak^2 / MSE), capped at kPsnrCap.
double psnr(const IntensityImage& img, const IntensityImage& gt, double peak);

/// Parameters of the structural similarity index.
struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};
/// Mean local SSIM over all fully-contained Gaussian windows.
double ssim(const IntensityImage& img, const IntensityImage& gt, double peak, const SsimOptions& opt = {});

struct CropResult {
  IntensityImage pred;
  IntensityImage gt;
  Rect region;
};

inline constexpr double kCropThreshold = 0.01;
inline constexpr int kCropMargin = 4;

/// Bounding box of gt pixels above 1% of the gt maximum, grown by a 4-pixel
/// margin and clamped to the frame.
Rect gt_crop_region(const IntensityImage& gt);
CropResult crop_to_gt(const IntensityImage& pred, const IntensityImage& gt);
IntensityImage crop(const IntensityImage& img, const Rect& r);
DepthMap crop(const DepthMap& d, const Rect& r);

}  // namespace trtkit
