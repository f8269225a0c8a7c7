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

#include "trtkit/pulse.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

inline constexpr double kLogMatchedEpsilon = 1e-6;

/// Log-matched filter: per pixel, correlate the histogram with
/// log(pulse + eps) circularly and take the argmax bin (lowest on ties).
/// Pixels with an all-zero or flat histogram are marked invalid.
DepthMap log_matched_filter(const TransientCube& cube, const PulseModel& pulse, double eps = kLogMatchedEpsilon);

/// Same as depth_from_argmax.
DepthMap raw_argmax(const TransientCube& cube);

/// Circular correlation of one histogram with log(pulse + eps), where the
/// pulse is zero outside its support: score[n] = sum_j h[j] * log(g(j - n) + eps).
std::vector<double> log_matched_scores(std::span<const double> histogram, const std::vector<double>& kernel,
                                       double eps = kLogMatchedEpsilon);

}  // namespace trtkit
