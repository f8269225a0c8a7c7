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

#include "trtkit/attention.hpp"
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

AttentionConfig desk_config(int c) {
  AttentionConfig cfg;
  cfg.channels = c;
  cfg.heads = 4;
  cfg.window_spatial = 4;
  cfg.window_temporal = 4;
  cfg.global_downsample = 2;
  cfg.blocks = 1;
  return cfg;
}

void BM_StsaLocalForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  ParameterSet ps;
  Initializer init(1);
  const EncoderParams p = make_encoder_params(ps, init, "e", c);
  const Tensor x = randn({16, 16, 16, c}, 2);
  const AttentionConfig cfg = desk_config(c);
  NoGradGuard ng;
  for (auto _ : state) benchmark::DoNotOptimize(stsa_local(Var(x), p, cfg).value().data());
}
BENCHMARK(BM_StsaLocalForward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_TrtBlockForwardBackward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  ParameterSet ps;
  Initializer init(3);
  std::vector<BlockParams> blocks{make_block_params(ps, init, "trt", 0, c)};
  const Tensor x = randn({16, 16, 16, c}, 4);
  const AttentionConfig cfg = desk_config(c);
  for (auto _ : state) {
    auto [l, g] = trt_stack(Var(x), blocks, cfg);
    backward(add(sum_all(l), sum_all(g)));
    ps.zero_grad();
  }
}
BENCHMARK(BM_TrtBlockForwardBackward)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Stca(benchmark::State& state) {
  ParameterSet ps;
  Initializer init(5);
  const DecoderParams p = make_decoder_params(ps, init, "d", 16);
  const Tensor q = randn({16, 16, 16, 16}, 6), kv = randn({16, 16, 16, 16}, 7);
  NoGradGuard ng;
  for (auto _ : state) benchmark::DoNotOptimize(stca(Var(q), Var(kv), p.stca_local).value().data());
}
BENCHMARK(BM_Stca)->Unit(benchmark::kMillisecond);

}  // namespace
