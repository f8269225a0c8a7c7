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

#include <array>

#include "trtkit/autograd.hpp"

namespace trtkit {

/// Geometry of a 3-D convolution over (H, W, T) axes.
struct Conv3dSpec {
  std::array<int, 3> stride{1, 1, 1};
  std::array<int, 3> padding{0, 0, 0};
  std::array<int, 3> dilation{1, 1, 1};

  /// Same-size output for odd kernels at unit stride.
  static Conv3dSpec same(int kernel = 3, int dilation = 1);
};

/// x(H, W, T, Cin) with weight(kh, kw, kt, Cin, Cout) and bias(Cout).
/// `bias` may be undefined.
Var conv3d(const Var& x, const Var& weight, const Var& bias, const Conv3dSpec& spec);

/// Per-channel convolution: weight(kh, kw, kt, C), bias(C).
Var depthwise_conv3d(const Var& x, const Var& weight, const Var& bias, const Conv3dSpec& spec);

/// Adjoint of conv3d w.r.t. its input (no dilation): weight(kh, kw, kt, Cin, Cout).
/// Output extent per axis is (n - 1) * stride - 2 * padding + k.
Var conv_transpose3d(const Var& x, const Var& weight, const Var& bias, const Conv3dSpec& spec);

std::array<int64_t, 3> conv3d_output_dims(const Shape& input, const Shape& weight, const Conv3dSpec& spec);

}  // namespace trtkit
