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

#include "trtkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

void require_same_depth(const DepthMap& d, const DepthMap& gt) {
  if (d.height != gt.height || d.width != gt.width) throw ShapeError("depth maps differ in shape");
  if (d.units != gt.units) throw ConfigError("depth maps use different units");
}

void require_same_image(const IntensityImage& a, const IntensityImage& b) {
  if (a.height != b.height || a.width != b.width) throw ShapeError("images differ in shape");
}

std::vector<double> gaussian_window(const SsimOptions& opt) {
  std::vector<double> g(static_cast<size_t>(opt.window));
  const double c = (opt.window - 1) / 2.0;
  double s = 0.0;
  for (int i = 0; i < opt.window; ++i) s += (g[i] = std::exp(-(i - c) * (i - c) / (2.0 * opt.sigma * opt.sigma)));
  for (double& v : g) v /= s;
  return g;
}

// Separable 'valid' filtering.
std::vector<double> filter_valid(const std::vector<double>& img, int64_t h, int64_t w, const std::vector<double>& k) {
  const auto n = static_cast<int64_t>(k.size());
  const int64_t wo = w - n + 1, ho = h - n + 1;
  std::vector<double> tmp(static_cast<size_t>(h * wo), 0.0);
  for (int64_t i = 0; i < h; ++i) {
    for (int64_t j = 0; j < wo; ++j) {
      double s = 0.0;
      for (int64_t q = 0; q < n; ++q) s += k[q] * img[i * w + j + q];
      tmp[i * wo + j] = s;
    }
  }
  std::vector<double> out(static_cast<size_t>(ho * wo), 0.0);
  for (int64_t i = 0; i < ho; ++i) {
    for (int64_t j = 0; j < wo; ++j) {
      double s = 0.0;
      for (int64_t q = 0; q < n; ++q) s += k[q] * tmp[(i + q) * wo + j];
      out[i * wo + j] = s;
    }
  }
  return out;
}

}  // namespace

double rmse(const DepthMap& d, const DepthMap& gt) {
  require_same_depth(d, gt);
  double acc = 0.0;
  int64_t n = 0;
  for (size_t i = 0; i < gt.values.size(); ++i) {
    if (!gt.valid[i]) continue;
    const double e = d.values[i] - gt.values[i];
    acc += e * e;
    ++n;
  }
  if (n == 0) throw ShapeError("rmse: ground truth has no valid pixels");
  return std::sqrt(acc / static_cast<double>(n));
}

double mad(const DepthMap& d, const DepthMap& gt) {
  require_same_depth(d, gt);
  double acc = 0.0;
  int64_t n = 0;
  for (size_t i = 0; i < gt.values.size(); ++i) {
    if (!gt.valid[i]) continue;
    acc += std::abs(d.values[i] - gt.values[i]);
    ++n;
  }
  if (n == 0) throw ShapeError("mad: ground truth has no valid pixels");
  return acc / static_cast<double>(n);
}

double psnr(const IntensityImage& img, const IntensityImage& gt, double peak) {
  require_same_image(img, gt);
  if (!(peak > 0.0)) throw ConfigError("psnr: peak must be positive");
  double mse = 0.0;
  for (size_t i = 0; i < gt.values.size(); ++i) {
    const double e = img.values[i] - gt.values[i];
    mse += e * e;
  }
  mse /= static_cast<double>(gt.values.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const IntensityImage& img, const IntensityImage& gt, double peak, const SsimOptions& opt) {
  require_same_image(img, gt);
  if (img.height < opt.window || img.width < opt.window) throw ShapeError("ssim: image smaller than window");
  const auto k = gaussian_window(opt);
  const double c1 = (opt.k1 * peak) * (opt.k1 * peak);
  const double c2 = (opt.k2 * peak) * (opt.k2 * peak);
  const int64_t h = img.height, w = img.width;
  std::vector<double> xx(img.values.size()), yy(img.values.size()), xy(img.values.size());
  for (size_t i = 0; i < xx.size(); ++i) {
    xx[i] = img.values[i] * img.values[i];
    yy[i] = gt.values[i] * gt.values[i];
    xy[i] = img.values[i] * gt.values[i];
  }
  const auto mx = filter_valid(img.values, h, w, k);
  const auto my = filter_valid(gt.values, h, w, k);
  const auto sxx = filter_valid(xx, h, w, k);
  const auto syy = filter_valid(yy, h, w, k);
  const auto sxy = filter_valid(xy, h, w, k);
  double total = 0.0;
  for (size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cv = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cv + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

Rect gt_crop_region(const IntensityImage& gt) {
  const double thr = kCropThreshold * gt.max();
  Rect r{gt.height, -1, gt.width, -1};
  bool any = false;
  for (int64_t i = 0; i < gt.height; ++i) {
    for (int64_t j = 0; j < gt.width; ++j) {
      if (gt.at(i, j) > thr) {
        any = true;
        r.row0 = std::min(r.row0, i);
        r.row1 = std::max(r.row1, i + 1);
        r.col0 = std::min(r.col0, j);
        r.col1 = std::max(r.col1, j + 1);
      }
    }
  }
  if (!any) throw ShapeError("crop_to_gt: ground truth has no pixel above threshold");
  r.row0 = std::max<int64_t>(0, r.row0 - kCropMargin);
  r.col0 = std::max<int64_t>(0, r.col0 - kCropMargin);
  r.row1 = std::min<int64_t>(gt.height, r.row1 + kCropMargin);
  r.col1 = std::min<int64_t>(gt.width, r.col1 + kCropMargin);
  return r;
}

IntensityImage crop(const IntensityImage& img, const Rect& r) {
  IntensityImage out(r.rows(), r.cols());
  for (int64_t i = 0; i < r.rows(); ++i) {
    for (int64_t j = 0; j < r.cols(); ++j) out.at(i, j) = img.at(r.row0 + i, r.col0 + j);
  }
  return out;
}

DepthMap crop(const DepthMap& d, const Rect& r) {
  DepthMap out(r.rows(), r.cols(), d.units);
  for (int64_t i = 0; i < r.rows(); ++i) {
    for (int64_t j = 0; j < r.cols(); ++j) {
      out.at(i, j) = d.at(r.row0 + i, r.col0 + j);
      out.valid[static_cast<size_t>(i * out.width + j)] = d.is_valid(r.row0 + i, r.col0 + j) ? 1 : 0;
    }
  }
  return out;
}

CropResult crop_to_gt(const IntensityImage& pred, const IntensityImage& gt) {
  require_same_image(pred, gt);
  const Rect r = gt_crop_region(gt);
  return {crop(pred, r), crop(gt, r), r};
}

}  // namespace trtkit
