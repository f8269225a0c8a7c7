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
#include <memory>
#include <vector>

#include "trtkit/attention.hpp"
#include "trtkit/fk.hpp"
#include "trtkit/params.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

struct NlosModelConfig {
  AttentionConfig attention;
  /// Input geometry; the FK prior is built for it.
  int64_t grid = 16;
  int64_t bins = 64;
  double bin_width_ps = 264.0;
  double wall_extent = 1.0;
  bool use_denoiser = true;
  std::vector<int> denoiser_channels{4, 8, 8, 8};
  int extract_down = 4;  // temporal downsampling before the FK prior
  int enhance_down = 2;  // further temporal downsampling before the blocks
  double alpha = 1.0;    // intensity loss weight
  double beta = 1.0;     // depth loss weight
  double temperature = 0.05;  // soft-argmax used by the depth loss
  double leaky_slope = 0.2;

  /// Depth bins of the reconstructed volume V.
  int64_t volume_bins() const { return bins / extract_down; }
  /// Metres per depth bin of V.
  double volume_bin_meters() const;
  void validate() const;
};

/// Parameter count of one depthwise + pointwise pair against a dense conv
/// with the same kernel.
struct SeparableCost {
  int64_t separable, dense;
};
SeparableCost separable_cost(int64_t kernel_volume, int64_t cin, int64_t cout);

struct NlosOutput {
  Var denoised;   // (N, N, T) rho-hat
  Var shallow_star;  // F_S*: FK-transformed features (N, N, T/4, C)
  Var shallow;    // F_S: enhanced features (N, N, T/8, C)
  Var volume;     // V (N, N, T/4)
  Var intensity;  // max over depth (N, N)
  Var soft_depth;  // soft-argmax depth in V bins (N, N)
  Tensor depth;   // argmax depth in V bins (N, N)
};

struct NlosLossTerms {
  Var total, measurement, intensity, depth;
};

class TrtNlos {
 public:
  TrtNlos(const NlosModelConfig& config, uint64_t seed);

  const NlosModelConfig& config() const noexcept { return config_; }
  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  /// Residual denoiser on an (N, N, T, 1) volume; returns (N, N, T, 1).
  Var denoise(const Var& x) const;
  /// Returns (F_S*, F_S).
  std::pair<Var, Var> shallow_extract(const Var& denoised) const;
  /// Returns V (N, N, T/4).
  Var fuse(const Var& shallow_star, const Var& deep_local, const Var& deep_global) const;
  NlosOutput forward(const Tensor& cube) const;

 private:
  NlosModelConfig config_;
  ParameterSet params_;
  std::shared_ptr<const FkMigration> fk_;
  std::vector<Conv3dLayer> den_convs_;
  std::vector<DepthwiseConv3dLayer> den_depthwise_;
  std::vector<LinearLayer> den_pointwise_;
  std::vector<Conv3dLayer> ext_down_;
  Conv3dLayer ext_res_a_, ext_res_b_;
  Conv3dLayer enh_down_;
  std::vector<Conv3dLayer> enh_ladder_;
  LinearLayer enh_merge_;
  std::vector<BlockParams> blocks_;
  ConvTranspose3dLayer up_local_, up_global_;
  Conv3dLayer fuse_conv_;
  LinearLayer fuse_out_;
};

/// Intensity = max over the last axis, depth = its argmax (lowest on ties).
std::pair<Var, Tensor> max_projection(const Var& volume);

/// Mean L1 of the measurement, alpha * mean L1 of the intensity, and
/// beta * mean L1 of the depth on `depth_mask`.
NlosLossTerms nlos_losses(const Var& denoised, const Tensor& measurement, const Var& intensity,
                          const Tensor& intensity_gt, const Var& depth, const Tensor& depth_gt,
                          const Tensor& depth_mask, double alpha, double beta);

}  // namespace trtkit
