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

#include "trtkit/los_sim.hpp"
#include "trtkit/scene_gen.hpp"

using namespace trtkit;

namespace {

void BM_PoissonDetect(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const SceneLOS scene = procedural_scene(scene_options_for(32, 32, 128, 80.0), 1);
  const TransientCube rates = ideal_transient(scene, PulseModel::gaussian(400.0, 80.0), 128, 80.0);
  const DetectionModel det = calibrate_sbr(rates, {}, 10.0, 2.0, scene.valid);
  uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(poisson_detect(rates, det, ++seed, threads).values().data());
  state.SetItemsProcessed(state.iterations() * rates.values().size());
}
BENCHMARK(BM_PoissonDetect)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_IdealTransient(benchmark::State& state) {
  const SceneLOS scene = procedural_scene(scene_options_for(32, 32, 128, 80.0), 2);
  const PulseModel pulse = PulseModel::gaussian(400.0, 80.0);
  for (auto _ : state) benchmark::DoNotOptimize(ideal_transient(scene, pulse, 128, 80.0).values().data());
}
BENCHMARK(BM_IdealTransient)->Unit(benchmark::kMillisecond);

}  // namespace
