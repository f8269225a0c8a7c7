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

#include "trtkit/trt_nlos.hpp"

#include "trtkit/error.hpp"
#include "trtkit/ops.hpp"

namespace trtkit {

double NlosModelConfig::volume_bin_meters() const {
  return meters_per_bin(bin_width_ps) * static_cast<double>(extract_down);
}

void NlosModelConfig::validate() const {
  attention.validate();
  if (grid < 2 || bins < 2) throw ConfigError("NLOS grid must be at least 2x2x2");
  if (!(bin_width_ps > 0.0) || !(wall_extent > 0.0)) throw ConfigError("NLOS geometry must be positive");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("loss weights must be >= 0");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (denoiser_channels.empty()) throw ConfigError("denoiser needs at least one convolution");
  for (int c : denoiser_channels)
    if (c < 1) throw ConfigError("denoiser channels must be positive");
  auto pow2 = [](int v) { return v >= 1 && (v & (v - 1)) == 0; };
  if (!pow2(extract_down) || !pow2(enhance_down)) throw ConfigError("temporal factors must be powers of two");
  if (enhance_down > 2) throw ConfigError("enhancement downsampling is limited to 2");
  const int64_t t_total = static_cast<int64_t>(extract_down) * enhance_down;
  if (bins % t_total != 0) throw ConfigError("bins must be divisible by the temporal downsampling");
  attention.check_volume({grid, grid, bins / t_total, attention.channels});
}

SeparableCost separable_cost(int64_t kernel_volume, int64_t cin, int64_t cout) {
  return {kernel_volume * cin + cin * cout, kernel_volume * cin * cout};
}

TrtNlos::TrtNlos(const NlosModelConfig& config, uint64_t seed) : config_(config) {
  config_.validate();
  Initializer init(seed);
  const int64_t c = config_.attention.channels;

  int64_t prev = 1;
  for (size_t i = 0; i < config_.denoiser_channels.size(); ++i) {
    const int64_t next = config_.denoiser_channels[i];
    den_convs_.push_back(make_conv3d(params_, init, "denoise.conv." + std::to_string(i), {3, 3, 3}, prev, next,
                                     Conv3dSpec::same()));
    prev = next;
  }
  for (int i = 0; i < 2; ++i) {
    const std::string name = "denoise.sep." + std::to_string(i);
    den_depthwise_.push_back(make_depthwise_conv3d(params_, init, name + ".dw", {3, 3, 3}, prev, Conv3dSpec::same()));
    den_pointwise_.push_back(make_linear(params_, init, name + ".pw", prev, i == 0 ? prev : 1));
  }
  // Start the residual branch near zero so the denoiser begins close to identity.
  {
    Var w = den_pointwise_.back().weight;
    Var b = den_pointwise_.back().bias;
    w.mutable_value() *= 1e-2;
    b.mutable_value() *= 0.0;
  }

  Conv3dSpec half;
  half.stride = {1, 1, 2};
  half.padding = {1, 1, 1};
  int64_t in = 1;
  for (int f = config_.extract_down, i = 0; f > 1; f /= 2, ++i) {
    ext_down_.push_back(make_conv3d(params_, init, "extract.down." + std::to_string(i), {3, 3, 3}, in, c, half));
    in = c;
  }
  if (ext_down_.empty()) {
    ext_down_.push_back(make_conv3d(params_, init, "extract.down.0", {3, 3, 3}, 1, c, Conv3dSpec::same()));
  }
  ext_res_a_ = make_conv3d(params_, init, "extract.res.a", {3, 3, 3}, c, c, Conv3dSpec::same());
  ext_res_b_ = make_conv3d(params_, init, "extract.res.b", {3, 3, 3}, c, c, Conv3dSpec::same());
  fk_ = std::make_shared<const FkMigration>(config_.grid, config_.volume_bins(), config_.wall_extent,
                                            config_.bin_width_ps * config_.extract_down);

  Conv3dSpec enh = Conv3dSpec::same();
  enh.stride = {1, 1, config_.enhance_down};
  enh_down_ = make_conv3d(params_, init, "enhance.down", {3, 3, 3}, c, c, enh);
  enh_ladder_.push_back(make_conv3d(params_, init, "enhance.ladder.0", {3, 3, 3}, c, c, Conv3dSpec::same(3, 1)));
  enh_ladder_.push_back(make_conv3d(params_, init, "enhance.ladder.1", {3, 3, 3}, c, c, Conv3dSpec::same(3, 2)));
  enh_merge_ = make_linear(params_, init, "enhance.merge", 2 * c, c);

  for (int i = 0; i < config_.attention.blocks; ++i)
    blocks_.push_back(make_block_params(params_, init, "trt", i, static_cast<int>(c)));

  const int e = config_.enhance_down;
  Conv3dSpec up;
  up.stride = {1, 1, e};
  up.padding = {0, 0, e / 2};
  up_local_ = make_conv_transpose3d(params_, init, "fuse.up_local", {1, 1, 2 * e}, c, c, up);
  up_global_ = make_conv_transpose3d(params_, init, "fuse.up_global", {1, 1, 2 * e}, c, c, up);
  fuse_conv_ = make_conv3d(params_, init, "fuse.conv", {3, 3, 3}, 3 * c, c, Conv3dSpec::same());
  fuse_out_ = make_linear(params_, init, "fuse.out", c, 1);
}

Var TrtNlos::denoise(const Var& x) const {
  Var y = x;
  for (const Conv3dLayer& conv : den_convs_) y = relu(conv(y));
  y = relu(den_pointwise_[0](den_depthwise_[0](y)));
  y = den_pointwise_[1](den_depthwise_[1](y));
  return relu(add(x, y));
}

std::pair<Var, Var> TrtNlos::shallow_extract(const Var& denoised) const {
  const double slope = config_.leaky_slope;
  Var e = denoised;
  for (const Conv3dLayer& conv : ext_down_) e = leaky_relu(conv(e), slope);
  e = add(e, ext_res_b_(leaky_relu(ext_res_a_(e), slope)));
  Var star = fk_migration(e, fk_);
  Var d = leaky_relu(enh_down_(star), slope);
  Var a = leaky_relu(enh_ladder_[0](d), slope);
  Var b = leaky_relu(enh_ladder_[1](a), slope);
  return {star, enh_merge_(concat_last({a, b}))};
}

Var TrtNlos::fuse(const Var& shallow_star, const Var& deep_local, const Var& deep_global) const {
  Var l = up_local_(deep_local);
  Var g = up_global_(deep_global);
  Var f = leaky_relu(fuse_conv_(concat_last({shallow_star, l, g})), config_.leaky_slope);
  Var v = fuse_out_(f);
  const Shape& s = v.shape();
  return reshape(v, {s[0], s[1], s[2]});
}

std::pair<Var, Tensor> max_projection(const Var& volume) {
  if (volume.shape().size() != 3) throw ShapeError("max_projection expects (H, W, Z)");
  return {max_last(volume), argmax_last(volume.value())};
}

NlosOutput TrtNlos::forward(const Tensor& cube) const {
  require_shape(cube, {config_.grid, config_.grid, config_.bins}, "TRT-NLOS input");
  Var x(cube.reshaped({config_.grid, config_.grid, config_.bins, 1}));
  NlosOutput out;
  Var den = config_.use_denoiser ? denoise(x) : x;
  out.denoised = reshape(den, {config_.grid, config_.grid, config_.bins});
  std::tie(out.shallow_star, out.shallow) = shallow_extract(den);
  auto [deep_local, deep_global] = trt_stack(out.shallow, blocks_, config_.attention);
  out.volume = fuse(out.shallow_star, deep_local, deep_global);
  std::tie(out.intensity, out.depth) = max_projection(out.volume);
  out.soft_depth = soft_argmax_last(out.volume, config_.temperature);
  return out;
}

NlosLossTerms nlos_losses(const Var& denoised, const Tensor& measurement, const Var& intensity,
                          const Tensor& intensity_gt, const Var& depth, const Tensor& depth_gt,
                          const Tensor& depth_mask, double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("loss weights must be >= 0");
  if (denoised.shape() != measurement.shape()) throw ShapeError("measurement loss: shape mismatch");
  if (intensity.shape() != intensity_gt.shape()) throw ShapeError("intensity loss: shape mismatch");
  if (depth.shape() != depth_gt.shape() || depth_gt.shape() != depth_mask.shape()) {
    throw ShapeError("depth loss: shape mismatch");
  }
  NlosLossTerms t;
  t.measurement = l1_mean(denoised, measurement);
  t.intensity = l1_mean(intensity, intensity_gt);
  bool any = false;
  for (int64_t i = 0; i < depth_mask.size(); ++i) any = any || depth_mask[i] != 0.0;
  t.depth = any ? masked_l1_mean(depth, depth_gt, depth_mask) : Var(Tensor({1}, 0.0));
  t.total = t.measurement;
  if (alpha > 0.0) t.total = add(t.total, scale(t.intensity, alpha));
  if (beta > 0.0 && any) t.total = add(t.total, scale(t.depth, beta));
  return t;
}

}  // namespace trtkit
