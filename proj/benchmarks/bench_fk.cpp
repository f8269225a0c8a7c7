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

#include <benchmark/benchmark.h>

#include <random>

#include "trtkit/fk.hpp"

using namespace trtkit;

namespace {

void BM_FkApply(benchmark::State& state) {
  const int64_t n = state.range(0), t = state.range(1);
  FkMigration fk(n, t, 1.0, 132.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor cube({n, n, t});
  for (double& v : cube.values()) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fk.apply(cube).data());
}
BENCHMARK(BM_FkApply)->Args({16, 16})->Args({16, 64})->Args({32, 128})->Unit(benchmark::kMillisecond);

void BM_FkPlan(benchmark::State& state) {
  for (auto _ : state) {
    FkMigration fk(16, 16, 1.0, 528.0);
    benchmark::DoNotOptimize(&fk);
  }
}
BENCHMARK(BM_FkPlan)->Unit(benchmark::kMillisecond);

}  // namespace
