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

#include "trtkit/optimizer.hpp"

#include <cmath>

#include "trtkit/error.hpp"

namespace trtkit {

AdamW::AdamW(const ParameterSet& params, const AdamWOptions& options)
    : params_(params.vars()), options_(options) {
  if (!(options.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(options.weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  for (const Var& p : params_) {
    m_.emplace_back(p.shape(), 0.0);
    v_.emplace_back(p.shape(), 0.0);
  }
  t_.assign(params_.size(), 0);
}

void AdamW::step() {
  double sq = 0.0;
  for (const Var& p : params_) {
    const Tensor& g = p.grad();
    for (int64_t i = 0; i < g.size(); ++i) sq += g[i] * g[i];
  }
  last_norm_ = std::sqrt(sq);
  if (!std::isfinite(last_norm_)) throw NumericalError("non-finite gradient");
  const double clip = options_.clip_norm > 0.0 && last_norm_ > options_.clip_norm ? options_.clip_norm / last_norm_ : 1.0;
  const double b1 = options_.beta1, b2 = options_.beta2;
  for (size_t k = 0; k < params_.size(); ++k) {
    Var& p = params_[k];
    const Tensor& g = p.grad();
    if (g.empty()) continue;
    const int64_t t = ++t_[k];
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    Tensor& w = p.mutable_value();
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    const double decay = 1.0 - options_.lr * options_.weight_decay;
    for (int64_t i = 0; i < w.size(); ++i) {
      const double gi = g[i] * clip;
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      w[i] = w[i] * decay - options_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.eps);
    }
    p.zero_grad();
  }
  ++steps_;
}

}  // namespace trtkit
