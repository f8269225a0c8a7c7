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

#include "trtkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "trtkit/error.hpp"
#include "trtkit/ops.hpp"

namespace trtkit {

GradcheckResult check_gradients(const std::function<Var()>& loss, const std::vector<Var>& leaves,
                                const GradcheckOptions& options) {
  std::vector<Var> params = leaves;
  for (Var& p : params) p.zero_grad();
  Var l = loss();
  if (l.size() != 1) throw ShapeError("check_gradients: loss must be scalar");
  backward(l);

  struct Probe {
    size_t leaf;
    int64_t index;
    double analytic;
    double numeric;
  };
  std::vector<Probe> probes;
  std::mt19937_64 rng(options.seed);
  for (size_t li = 0; li < params.size(); ++li) {
    Var& p = params[li];
    const Tensor grad = p.grad().empty() ? Tensor(p.shape(), 0.0) : p.grad();
    std::vector<int64_t> idx(static_cast<size_t>(p.size()));
    std::iota(idx.begin(), idx.end(), 0);
    if (options.max_entries_per_leaf > 0 && p.size() > options.max_entries_per_leaf) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<size_t>(options.max_entries_per_leaf));
      std::sort(idx.begin(), idx.end());
    }
    NoGradGuard guard;
    for (int64_t i : idx) {
      double& v = p.mutable_value()[i];
      const double orig = v;
      v = orig + options.step;
      const double fp = loss().value()[0];
      v = orig - options.step;
      const double fm = loss().value()[0];
      v = orig;
      probes.push_back({li, i, grad[i], (fp - fm) / (2.0 * options.step)});
    }
  }
  if (options.corrupt != 0.0 && !probes.empty()) {
    auto it = std::max_element(probes.begin(), probes.end(),
                               [](const Probe& a, const Probe& b) { return std::abs(a.analytic) < std::abs(b.analytic); });
    it->analytic *= 1.0 + options.corrupt;
  }

  double scale = 0.0;
  for (const Probe& pr : probes) scale = std::max({scale, std::abs(pr.analytic), std::abs(pr.numeric)});
  GradcheckResult result;
  result.checked = static_cast<int64_t>(probes.size());
  for (const Probe& pr : probes) {
    const double denom = std::max({std::abs(pr.analytic), std::abs(pr.numeric), 1e-3 * scale, 1e-300});
    const double err = std::abs(pr.analytic - pr.numeric) / denom;
    if (!(err <= result.max_rel_error)) {
      result.max_rel_error = err;
      result.worst = "leaf" + std::to_string(pr.leaf) + "[" + std::to_string(pr.index) + "]";
    }
  }
  if (scale == 0.0 && !probes.empty()) result.worst = "all-zero gradient";
  result.passed = std::isfinite(result.max_rel_error) && result.max_rel_error <= options.tolerance;
  return result;
}

GradcheckResult gradcheck(const std::function<Var(const std::vector<Var>&)>& f, const std::vector<Tensor>& inputs,
                          const GradcheckOptions& options) {
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.emplace_back(t, true);
  Tensor projection;
  {
    NoGradGuard guard;
    const Var probe = f(leaves);
    projection = Tensor(probe.shape());
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    for (int64_t i = 0; i < projection.size(); ++i) projection[i] = normal(rng);
  }
  return check_gradients([&] { return dot_const(f(leaves), projection); }, leaves, options);
}

}  // namespace trtkit
