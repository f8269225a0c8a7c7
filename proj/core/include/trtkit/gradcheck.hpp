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
#include <functional>
#include <string>
#include <vector>

#include "trtkit/autograd.hpp"

namespace trtkit {

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Entries probed per leaf; <= 0 probes every entry.
  int64_t max_entries_per_leaf = 0;
  uint64_t seed = 7;
  /// Negative control: scales one analytic gradient entry by (1 + corrupt).
  double corrupt = 0.0;
};

struct GradcheckResult {
  double max_rel_error = 0.0;
  int64_t checked = 0;
  std::string worst;  // "leaf[index]" of the worst entry
  bool passed = false;
};

/// Compares reverse-mode gradients of a scalar `loss` w.r.t. `leaves`
/// against central finite differences. Leaves are perturbed in place and
/// restored. The relative error of an entry is
/// |a - n| / max(|a|, |n|, 1e-3 * max_entry_magnitude).
GradcheckResult check_gradients(const std::function<Var()>& loss, const std::vector<Var>& leaves,
                                const GradcheckOptions& options = {});

/// Checks an arbitrary-shaped function of `inputs`, reduced to a scalar by
/// a fixed random projection.
GradcheckResult gradcheck(const std::function<Var(const std::vector<Var>&)>& f, const std::vector<Tensor>& inputs,
                          const GradcheckOptions& options = {});

}  // namespace trtkit
