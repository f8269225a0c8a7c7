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

// Naive scalar-loop reference implementations used as test oracles. They
// share no code with the library beyond its plain data containers.

#include <cstdint>
#include <vector>

#include "trtkit/attention.hpp"
#include "trtkit/nlos_sim.hpp"
#include "trtkit/pulse.hpp"
#include "trtkit/tensor.hpp"
#include "trtkit/transient.hpp"

namespace trtkit::oracle {

/// x(L, E) -> x W + b for W(E_in, E_out).
std::vector<double> affine(const std::vector<double>& x, int64_t rows, const Tensor& w, const Tensor& b);
std::vector<double> layer_norm(const std::vector<double>& x, int64_t rows, const Tensor& gamma, const Tensor& beta,
                               double eps = 1e-5);

/// Multi-head attention of one token sequence (L, E).
std::vector<double> msa(const std::vector<double>& tokens, int64_t length, const MsaParams& p, int heads);

/// Single-head cross attention of (H, W, T, C) volumes, written as explicit
/// token loops over HW positions then over T slices.
Tensor stca(const Tensor& query, const Tensor& kv, const StcaParams& p);

double gelu(double x);
/// Local encoder composed from partition loops, `msa` and an explicit FFN.
Tensor stsa_local(const Tensor& x, const EncoderParams& p, const AttentionConfig& cfg);

/// sum_n n softmax(h / temp)[n].
double soft_argmax(const std::vector<double>& h, double temperature);
/// Mean absolute difference over all 4-neighbour pairs.
double tv(const Tensor& d);

double rmse(const DepthMap& d, const DepthMap& gt);
double mad(const DepthMap& d, const DepthMap& gt);
double psnr(const IntensityImage& a, const IntensityImage& b, double peak);
/// Sliding-window SSIM with an 11-tap sigma 1.5 Gaussian, valid windows only.
double ssim(const IntensityImage& a, const IntensityImage& b, double peak);

/// score[n] = sum_j h[j] log(g(j - n) + eps), g zero outside its support,
/// indices taken modulo T.
std::vector<double> lm_scores(const std::vector<double>& h, const std::vector<double>& kernel, double eps);
int64_t argmax_first(const std::vector<double>& v);

/// Per-pixel pulse placed at round(z / bin metres), scaled by albedo.
TransientCube los_transient(const std::vector<double>& depth, const std::vector<double>& albedo,
                            const std::vector<uint8_t>& valid, int64_t h, int64_t w, const std::vector<double>& kernel,
                            int64_t bins, double bin_width_ps);

/// Confocal render by brute force over (wall pixel, point, bin, tap).
TransientCube confocal(const HiddenScene& scene, const ScanGrid& grid, const std::vector<double>& kernel);

/// Spherical backprojection: vol[y, x, z] sums cube values of every wall
/// pixel at the bin of its distance to voxel (x, y, z).
Tensor backprojection(const TransientCube& cube, double wall_extent);

}  // namespace trtkit::oracle
