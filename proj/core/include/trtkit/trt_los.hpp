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

#include "trtkit/attention.hpp"
#include "trtkit/params.hpp"
#include "trtkit/pulse.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

/// (H, W, T, C) -> (H, W, T * r, C / r) with out[h, w, t * r + s, c] = in[h, w, t, c * r + s].
Var temporal_pixelshuffle(const Var& x, int r);
Var temporal_pixelunshuffle(const Var& x, int r);
/// (H, W, T, C) -> (rH, rW, rT, C / r^3) with sub-position (a_h * r + a_w) * r + a_t
/// taken from the low channel digits.
Var pixelshuffle_3d(const Var& x, int r);
Var pixelunshuffle_3d(const Var& x, int r);

struct LosModelConfig {
  AttentionConfig attention;
  double gamma = 1e-5;        // TV weight
  double temperature = 1.0;   // soft-argmax temperature
  double leaky_slope = 0.2;
  int spatial_down = 2;       // extractor: first strided conv
  int temporal_down = 2;      // extractor: first strided conv
  int temporal_pool = 4;      // extractor: final temporal downsampling
  int temporal_shuffle = 4;   // head: temporal pixelshuffle factor
  /// Zero-initialise the extractor's last layer.
  bool zero_init_extractor_tail = false;

  /// Spatial-temporal pixelshuffle factor of the head, equal to spatial_down.
  int spatial_shuffle() const { return spatial_down; }
  void validate() const;
  /// Throws ShapeError unless an (H, W, T) cube fits the extractor and the windows.
  void check_input(int64_t height, int64_t width, int64_t bins) const;
};

struct LosOutput {
  Var logits;     // (H, W, T) pre-activation scores
  Var histogram;  // (H, W, T) nonnegative, each pixel sums to 1
  Var depth;      // (H, W) soft-argmax depth in bins
};

struct LosLossTerms {
  Var total, kl, tv;
};

/// TRT-LOS network: feature extraction, attention blocks, pixelshuffle
/// fusion head and soft-argmax readout.
class TrtLos {
 public:
  TrtLos(const LosModelConfig& config, uint64_t seed);

  const LosModelConfig& config() const noexcept { return config_; }
  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  /// Shallow features F_S of an (H, W, T, 1) input: (H/s, W/s, T/(t*p), C).
  Var extract(const Var& input) const;
  /// Histogram logits from the deep features.
  Var head(const Var& deep_local, const Var& deep_global) const;
  /// Full forward pass on an (H, W, T) cube already scaled by `normalize_input`.
  LosOutput forward(const Tensor& cube) const;

 private:
  LosModelConfig config_;
  ParameterSet params_;
  Conv3dLayer down_;
  std::vector<Conv3dLayer> ladder_;  // conv, dilated conv, conv, dilated conv
  Conv3dLayer pool_;
  std::vector<BlockParams> blocks_;
  LinearLayer proj_local_, proj_global_;
};

/// Scales a count cube to [0, 1] by its maximum; an all-zero cube is returned unchanged.
Tensor normalize_input(const Tensor& cube);

/// Splits a normalised histogram from (unnormalised) logits: softplus then
/// per-pixel normalisation.
Var histogram_from_logits(const Var& logits);

/// sum_n n * softmax(h / temperature)[n] per pixel of an (H, W, T) volume.
Var soft_argmax_depth(const Var& h, double temperature = 1.0);

/// KL(H_pred || H_gt) averaged over pixels; both normalised per pixel.
Var kl_loss(const Var& predicted, const Tensor& target);
LosLossTerms los_total_loss(const Var& predicted, const Tensor& target, const Var& depth, double gamma);

/// Per-pixel target distribution: the pulse centred on each GT depth bin,
/// normalised after edge clipping. Invalid pixels get a uniform histogram.
Tensor los_target_histogram(const DepthMap& depth_m, const PulseModel& pulse, int64_t bins, double bin_width_ps);

/// Masks pixels whose intensity is strictly below the image mean.
DepthMap reflectivity_threshold_filter(const DepthMap& depth, const IntensityImage& intensity);

/// Per-pixel photon totals, used as a reflectivity estimate.
IntensityImage intensity_from_counts(const TransientCube& cube);

}  // namespace trtkit
