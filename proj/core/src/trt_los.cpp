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

#include "trtkit/trt_los.hpp"

#include <algorithm>
#include <cmath>

#include "trtkit/error.hpp"
#include "trtkit/ops.hpp"

namespace trtkit {

namespace {

void check_factor(const Var& x, int r, const char* op) {
  if (x.shape().size() != 4) throw ShapeError(std::string(op) + " expects (H, W, T, C)");
  if (r < 1) throw ConfigError(std::string(op) + ": factor must be positive");
}

}  // namespace

Var temporal_pixelshuffle(const Var& x, int r) {
  check_factor(x, r, "temporal_pixelshuffle");
  const Shape s = x.shape();
  if (s[3] % r != 0) throw ShapeError("temporal_pixelshuffle: channels not divisible by factor");
  Var y = permute(reshape(x, {s[0], s[1], s[2], s[3] / r, r}), {0, 1, 2, 4, 3});
  return reshape(y, {s[0], s[1], s[2] * r, s[3] / r});
}

Var temporal_pixelunshuffle(const Var& x, int r) {
  check_factor(x, r, "temporal_pixelunshuffle");
  const Shape s = x.shape();
  if (s[2] % r != 0) throw ShapeError("temporal_pixelunshuffle: time not divisible by factor");
  Var y = permute(reshape(x, {s[0], s[1], s[2] / r, r, s[3]}), {0, 1, 2, 4, 3});
  return reshape(y, {s[0], s[1], s[2] / r, s[3] * r});
}

Var pixelshuffle_3d(const Var& x, int r) {
  check_factor(x, r, "pixelshuffle_3d");
  const Shape s = x.shape();
  const int64_t r3 = static_cast<int64_t>(r) * r * r;
  if (s[3] % r3 != 0) throw ShapeError("pixelshuffle_3d: channels not divisible by r^3");
  Var y = permute(reshape(x, {s[0], s[1], s[2], s[3] / r3, r, r, r}), {0, 4, 1, 5, 2, 6, 3});
  return reshape(y, {s[0] * r, s[1] * r, s[2] * r, s[3] / r3});
}

Var pixelunshuffle_3d(const Var& x, int r) {
  check_factor(x, r, "pixelunshuffle_3d");
  const Shape s = x.shape();
  if (s[0] % r != 0 || s[1] % r != 0 || s[2] % r != 0) throw ShapeError("pixelunshuffle_3d: dims not divisible");
  Var y = permute(reshape(x, {s[0] / r, r, s[1] / r, r, s[2] / r, r, s[3]}), {0, 2, 4, 6, 1, 3, 5});
  return reshape(y, {s[0] / r, s[1] / r, s[2] / r, s[3] * r * r * r});
}

void LosModelConfig::validate() const {
  attention.validate();
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  auto pow2 = [](int v) { return v >= 1 && (v & (v - 1)) == 0; };
  if (!pow2(spatial_down) || !pow2(temporal_down) || !pow2(temporal_pool) || !pow2(temporal_shuffle)) {
    throw ConfigError("extractor and shuffle factors must be powers of two");
  }
  if (spatial_down < 2) throw ConfigError("spatial downsampling must be at least 2");
  if (temporal_shuffle * spatial_down != temporal_down * temporal_pool) {
    throw ConfigError("head shuffles must undo the extractor's temporal downsampling");
  }
}

void LosModelConfig::check_input(int64_t height, int64_t width, int64_t bins) const {
  const int64_t t_total = static_cast<int64_t>(temporal_down) * temporal_pool;
  if (height % spatial_down != 0 || width % spatial_down != 0 || bins % t_total != 0) {
    throw ShapeError("cube " + std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(bins) +
                     " is not divisible by the extractor factors");
  }
  attention.check_volume({height / spatial_down, width / spatial_down, bins / t_total, attention.channels});
}

TrtLos::TrtLos(const LosModelConfig& config, uint64_t seed) : config_(config) {
  config_.validate();
  Initializer init(seed);
  const int64_t c = config_.attention.channels;
  Conv3dSpec down;
  down.stride = {config_.spatial_down, config_.spatial_down, config_.temporal_down};
  down.padding = {1, 1, 1};
  down_ = make_conv3d(params_, init, "extract.down", {3, 3, 3}, 1, c, down);
  const int dilations[] = {1, 2, 1, 2};
  for (int i = 0; i < 4; ++i) {
    ladder_.push_back(make_conv3d(params_, init, "extract.ladder." + std::to_string(i), {3, 3, 3}, c, c,
                                  Conv3dSpec::same(3, dilations[i])));
  }
  Conv3dSpec pool;
  pool.stride = {1, 1, config_.temporal_pool};
  pool_ = make_conv3d(params_, init, "extract.pool", {1, 1, config_.temporal_pool}, 2 * c, c, pool,
                      config_.zero_init_extractor_tail);
  for (int i = 0; i < config_.attention.blocks; ++i)
    blocks_.push_back(make_block_params(params_, init, "trt", i, static_cast<int>(c)));
  const int64_t s = config_.spatial_down;
  const int64_t head_channels = config_.temporal_shuffle * s * s * s / 2;
  proj_local_ = make_linear(params_, init, "head.local", c, head_channels);
  proj_global_ = make_linear(params_, init, "head.global", c, head_channels);
}

Var TrtLos::extract(const Var& input) const {
  const double slope = config_.leaky_slope;
  Var x = leaky_relu(down_(input), slope);
  Var a = leaky_relu(ladder_[0](x), slope);
  Var b = leaky_relu(ladder_[1](a), slope);
  Var c = leaky_relu(ladder_[2](b), slope);
  Var d = leaky_relu(ladder_[3](c), slope);
  return pool_(concat_last({b, d}));
}

Var TrtLos::head(const Var& deep_local, const Var& deep_global) const {
  const int rt = config_.temporal_shuffle;
  Var l = temporal_pixelshuffle(proj_local_(deep_local), rt);
  Var g = temporal_pixelshuffle(proj_global_(deep_global), rt);
  Var v = pixelshuffle_3d(concat_last({l, g}), config_.spatial_shuffle());
  const Shape& s = v.shape();
  return reshape(v, {s[0], s[1], s[2]});
}

LosOutput TrtLos::forward(const Tensor& cube) const {
  if (cube.rank() != 3) throw ShapeError("TRT-LOS expects an (H, W, T) cube");
  config_.check_input(cube.dim(0), cube.dim(1), cube.dim(2));
  Var input(cube.reshaped({cube.dim(0), cube.dim(1), cube.dim(2), 1}));
  Var shallow = extract(input);
  auto [deep_local, deep_global] = trt_stack(shallow, blocks_, config_.attention);
  LosOutput out;
  out.logits = head(deep_local, deep_global);
  out.histogram = histogram_from_logits(out.logits);
  out.depth = soft_argmax_depth(out.logits, config_.temperature);
  return out;
}

Tensor normalize_input(const Tensor& cube) {
  double peak = 0.0;
  for (int64_t i = 0; i < cube.size(); ++i) peak = std::max(peak, cube[i]);
  Tensor out = cube;
  if (peak > 0.0) out *= 1.0 / peak;
  return out;
}

Var histogram_from_logits(const Var& logits) { return normalize_last(softplus(logits)); }

Var soft_argmax_depth(const Var& h, double temperature) {
  const Shape& s = h.shape();
  if (s.size() != 3) throw ShapeError("soft_argmax_depth expects (H, W, T)");
  return reshape(soft_argmax_last(h, temperature), {s[0], s[1]});
}

Var kl_loss(const Var& predicted, const Tensor& target) { return kl_divergence(predicted, target); }

LosLossTerms los_total_loss(const Var& predicted, const Tensor& target, const Var& depth, double gamma) {
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  LosLossTerms t;
  t.kl = kl_loss(predicted, target);
  t.tv = tv_loss(depth);
  t.total = gamma == 0.0 ? t.kl : add(t.kl, scale(t.tv, gamma));
  return t;
}

Tensor los_target_histogram(const DepthMap& depth_m, const PulseModel& pulse, int64_t bins, double bin_width_ps) {
  depth_m.validate();
  if (depth_m.units != DepthUnits::meters) throw ConfigError("target histograms need metric depth");
  Tensor out({depth_m.height, depth_m.width, bins});
  const double bin_m = meters_per_bin(bin_width_ps);
  std::vector<double> delta(static_cast<size_t>(bins));
  for (int64_t p = 0; p < depth_m.height * depth_m.width; ++p) {
    std::span<double> row(out.data() + p * bins, static_cast<size_t>(bins));
    const int64_t n = depth_m.valid[static_cast<size_t>(p)] ? std::llround(depth_m.values[static_cast<size_t>(p)] / bin_m) : -1;
    if (n < 0 || n >= bins) {
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(bins));
      continue;
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    delta[static_cast<size_t>(n)] = 1.0;
    convolve_clipped(delta, pulse.kernel, row);
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
  }
  return out;
}

DepthMap reflectivity_threshold_filter(const DepthMap& depth, const IntensityImage& intensity) {
  if (depth.height != intensity.height || depth.width != intensity.width) {
    throw ShapeError("reflectivity filter: depth and intensity sizes differ");
  }
  double mean = 0.0;
  for (double v : intensity.values) mean += v;
  mean /= static_cast<double>(intensity.values.size());
  DepthMap out = depth;
  for (size_t i = 0; i < intensity.values.size(); ++i) {
    if (intensity.values[i] < mean) out.valid[i] = 0;
  }
  return out;
}

IntensityImage intensity_from_counts(const TransientCube& cube) {
  IntensityImage img(cube.height(), cube.width(), 0.0);
  for (int64_t h = 0; h < cube.height(); ++h)
    for (int64_t w = 0; w < cube.width(); ++w) {
      double s = 0.0;
      for (double v : cube.histogram(h, w)) s += v;
      img.at(h, w) = s;
    }
  return img;
}

}  // namespace trtkit
