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
#include <string>
#include <vector>

#include "trtkit/gradcheck.hpp"

namespace trtkit {

struct GradcheckEntry {
  std::string module;  // "ops", "attention", "los" or "nlos"
  std::string name;
  GradcheckResult result;
  double seconds = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double seconds = 0.0;

  bool passed() const;
  std::string to_json() const;
};

/// Selectors accepted by `run_gradcheck_suite`.
const std::vector<std::string>& gradcheck_selectors();

/// Finite-difference checks of every differentiable operator and network
/// component in the selected module ("all" runs everything). A nonzero
/// `corrupt` scales one analytic gradient per entry as a negative control.
GradcheckReport run_gradcheck_suite(const std::string& selector, uint64_t seed, double corrupt = 0.0);

}  // namespace trtkit
