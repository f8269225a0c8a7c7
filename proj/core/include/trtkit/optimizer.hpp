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

#include "trtkit/params.hpp"

namespace trtkit {

struct AdamWOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled weight decay, applied as p -= lr * weight_decay * p.
  double weight_decay = 1e-4;
  /// Rescale gradients whose global L2 norm exceeds this; 0 disables.
  double clip_norm = 0.0;
};

/// Adam with decoupled weight decay over every tensor of a ParameterSet.
/// Parameters without a gradient in a step are left untouched.
class AdamW {
 public:
  AdamW(const ParameterSet& params, const AdamWOptions& options);

  /// Applies one update from the accumulated gradients, then clears them.
  void step();
  double lr() const noexcept { return options_.lr; }
  void set_lr(double lr) { options_.lr = lr; }
  int64_t steps() const noexcept { return steps_; }
  /// Global gradient norm seen by the last step (before clipping).
  double last_grad_norm() const noexcept { return last_norm_; }

 private:
  std::vector<Var> params_;
  AdamWOptions options_;
  std::vector<Tensor> m_, v_;
  std::vector<int64_t> t_;
  int64_t steps_ = 0;
  double last_norm_ = 0.0;
};

}  // namespace trtkit
