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

#include "trtkit/conv.hpp"
#include "trtkit/ops.hpp"

using namespace trtkit;

namespace {

Tensor randn(const Shape& s, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Tensor t(s);
  for (double& v : t.values()) v = d(rng);
  return t;
}

// (cin, cout) on a 32x32x64 volume, kernel 3.
void BM_Conv3dForward(benchmark::State& state) {
  const int64_t cin = state.range(0), cout = state.range(1);
  const Tensor x = randn({32, 32, 64, cin}, 1);
  const Var w(randn({3, 3, 3, cin, cout}, 2)), b(randn({cout}, 3));
  NoGradGuard ng;
  for (auto _ : state) benchmark::DoNotOptimize(conv3d(Var(x), w, b, Conv3dSpec::same()).value().data());
  state.SetItemsProcessed(state.iterations() * 32 * 32 * 64 * 27 * cin * cout);
}
BENCHMARK(BM_Conv3dForward)->Args({1, 16})->Args({16, 16})->Unit(benchmark::kMillisecond);

void BM_Conv3dBackward(benchmark::State& state) {
  const int64_t c = state.range(0);
  const Var x(randn({16, 16, 32, c}, 4), true);
  const Var w(randn({3, 3, 3, c, c}, 5), true), b(randn({c}, 6), true);
  for (auto _ : state) {
    backward(sum_all(conv3d(x, w, b, Conv3dSpec::same())));
  }
}
BENCHMARK(BM_Conv3dBackward)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_DepthwiseConv3d(benchmark::State& state) {
  const Tensor x = randn({16, 16, 64, 8}, 7);
  const Var w(randn({3, 3, 3, 8}, 8)), b(randn({8}, 9));
  NoGradGuard ng;
  for (auto _ : state) benchmark::DoNotOptimize(depthwise_conv3d(Var(x), w, b, Conv3dSpec::same()).value().data());
}
BENCHMARK(BM_DepthwiseConv3d)->Unit(benchmark::kMillisecond);

}  // namespace
