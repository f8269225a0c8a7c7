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

#include <vector>

#include "trtkit/autograd.hpp"

namespace trtkit {

// Elementwise arithmetic. Operands of binary ops must share a shape.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double s);
Var add_scalar(const Var& x, double s);
/// x + bias broadcast along the last axis.
Var add_bias(const Var& x, const Var& bias);

Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);
/// Exact (erf) GELU.
Var gelu(const Var& x);
Var softplus(const Var& x);

// Layout.
Var reshape(const Var& x, Shape shape);
Var permute(const Var& x, const std::vector<int>& axes);
Var concat_last(const std::vector<Var>& parts);

// Linear algebra.
Var matmul(const Var& a, const Var& b);
/// Batched product of (B, M, K) with (B, K, N), or with (B, N, K) when
/// transpose_b is set.
Var bmm(const Var& a, const Var& b, bool transpose_b = false);
/// x(..., in) * w(in, out) + b(out). `b` may be undefined.
Var linear(const Var& x, const Var& w, const Var& b);

// Normalisation along the last axis.
Var softmax_last(const Var& x);
Var layer_norm_last(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);
/// Divides each row along the last axis by its sum.
Var normalize_last(const Var& x);

// Spatial resampling of (H, W, T, C) volumes.
Var avg_pool_spatial(const Var& x, int factor);
Var upsample_nearest_spatial(const Var& x, int factor);

// Reductions.
Var sum_all(const Var& x);
Var mean_all(const Var& x);
/// sum(x * w) for a constant weight tensor.
Var dot_const(const Var& x, const Tensor& w);
/// Maximum along the last axis; ties resolve to the lowest index.
Var max_last(const Var& x);
/// Index of the maximum along the last axis (lowest index on ties).
Tensor argmax_last(const Tensor& x);
/// Sum_n n * softmax(x / temperature)[n] along the last axis.
Var soft_argmax_last(const Var& x, double temperature = 1.0);

// Losses against constant targets.
/// Mean over rows of sum_n p[n] * log((p[n] + eps) / (q[n] + eps)).
/// Both p and q must be normalised along the last axis.
Var kl_divergence(const Var& p, const Tensor& q, double eps = 1e-8);
/// Anisotropic total variation of a 2-D map, averaged over all
/// neighbouring pairs.
Var tv_loss(const Var& d);
Var l1_mean(const Var& a, const Tensor& b);
/// Mean |a - b| over entries where mask != 0.
Var masked_l1_mean(const Var& a, const Tensor& b, const Tensor& mask);

}  // namespace trtkit
