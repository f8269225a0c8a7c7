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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "trtkit/error.hpp"
#include "trtkit/gradcheck.hpp"
#include "trtkit/ops.hpp"
#include "trtkit/trt_los.hpp"

using namespace trtkit;

namespace {

Tensor randn(const Shape& s, uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sd);
  Tensor t(s);
  for (double& v : t.values()) v = d(rng);
  return t;
}

LosModelConfig small_config(int c) {
  LosModelConfig cfg;
  cfg.attention.channels = c;
  cfg.attention.heads = 2;
  cfg.attention.window_spatial = 2;
  cfg.attention.window_temporal = 2;
  cfg.attention.global_downsample = 2;
  cfg.attention.blocks = 1;
  return cfg;
}

}  // namespace

TEST(PixelShuffle, TemporalIdentityAndIndexMap) {
  const Tensor x = randn({2, 2, 3, 4}, 1);
  EXPECT_EQ(temporal_pixelshuffle(Var(x), 1).value().values()[5], x[5]);
  Tensor e({1, 1, 2, 4});
  for (int i = 0; i < 8; ++i) e[i] = i;
  const Tensor y = temporal_pixelshuffle(Var(e), 2).value();
  ASSERT_EQ(y.shape(), (Shape{1, 1, 4, 2}));
  for (int t = 0; t < 2; ++t)
    for (int c = 0; c < 2; ++c)
      for (int s = 0; s < 2; ++s) EXPECT_EQ(y.at({0, 0, t * 2 + s, c}), e.at({0, 0, t, c * 2 + s}));
  const Tensor back = temporal_pixelunshuffle(Var(y), 2).value();
  for (int i = 0; i < 8; ++i) EXPECT_EQ(back[i], e[i]);
}

TEST(PixelShuffle, SpatioTemporalIndexMap) {
  Tensor e({1, 1, 1, 8});
  for (int i = 0; i < 8; ++i) e[i] = i;
  const Tensor y = pixelshuffle_3d(Var(e), 2).value();
  ASSERT_EQ(y.shape(), (Shape{2, 2, 2, 1}));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) EXPECT_EQ(y.at({a, b, c, 0}), (a * 2 + b) * 2 + c);
  const Tensor x = randn({2, 3, 2, 16}, 2);
  const Tensor rt = pixelunshuffle_3d(pixelshuffle_3d(Var(x), 2), 2).value();
  for (int64_t i = 0; i < x.size(); ++i) EXPECT_EQ(rt[i], x[i]);
  EXPECT_EQ(pixelshuffle_3d(Var(x), 1).value()[7], x[7]);
  EXPECT_THROW(pixelshuffle_3d(Var(randn({1, 1, 1, 6}, 3)), 2), ShapeError);
}

TEST(SoftArgmax, Examples) {
  const Tensor uniform({1, 1, 128}, 0.3);
  EXPECT_NEAR(soft_argmax_depth(Var(uniform)).value()[0], 63.5, 1e-9);
  Tensor spike({1, 1, 16}, 0.0);
  spike[7] = 1e3;
  EXPECT_NEAR(soft_argmax_depth(Var(spike)).value()[0], 7.0, 1e-3);
}

TEST(SoftArgmax, MatchesOracle) {
  const Tensor h = randn({2, 2, 16}, 4, 2.0);
  for (double temp : {1.0, 0.3}) {
    const Tensor d = soft_argmax_depth(Var(h), temp).value();
    for (int p = 0; p < 4; ++p) {
      const std::vector<double> row(h.data() + p * 16, h.data() + (p + 1) * 16);
      EXPECT_NEAR(d[p], oracle::soft_argmax(row, temp), 1e-10);
    }
  }
}

TEST(SoftArgmax, TranslationConsistent) {
  Tensor h({1, 1, 64}, -30.0);
  for (int k = -4; k <= 4; ++k) h[20 + k] = -0.25 * k * k;
  const double base = soft_argmax_depth(Var(h)).value()[0];
  for (int shift : {3, 11, 25}) {
    Tensor s({1, 1, 64});
    for (int n = 0; n < 64; ++n) s[(n + shift) % 64] = h[n];
    EXPECT_NEAR(soft_argmax_depth(Var(s)).value()[0], base + shift, 1e-9);
  }
}

TEST(Histogram, NormalisedPerPixel) {
  const Tensor logits = randn({3, 3, 32}, 5, 3.0);
  const Tensor h = histogram_from_logits(Var(logits)).value();
  for (int p = 0; p < 9; ++p) {
    double s = 0.0;
    for (int n = 0; n < 32; ++n) {
      s += h[p * 32 + n];
      EXPECT_GE(h[p * 32 + n], 0.0);
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(Kl, Examples) {
  const Tensor p = histogram_from_logits(Var(randn({2, 2, 8}, 6))).value();
  EXPECT_LE(std::abs(kl_loss(Var(p), p).value()[0]), 1e-9);
  const Tensor a({1, 1, 2}, std::vector<double>{1.0, 0.0});
  const Tensor b({1, 1, 2}, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(kl_loss(Var(a), b).value()[0], std::log(2.0), 1e-7);
}

TEST(Kl, Nonnegative) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Tensor p = histogram_from_logits(Var(randn({2, 2, 8}, seed))).value();
    const Tensor q = histogram_from_logits(Var(randn({2, 2, 8}, seed + 100))).value();
    EXPECT_GE(kl_loss(Var(p), q).value()[0], -1e-7);
  }
}

TEST(Tv, ExamplesAndOracle) {
  EXPECT_EQ(tv_loss(Var(Tensor({3, 3}, 2.0))).value()[0], 0.0);
  EXPECT_DOUBLE_EQ(tv_loss(Var(Tensor({1, 2}, std::vector<double>{0.0, 1.0}))).value()[0], 1.0);
  const Tensor d = randn({4, 4}, 7);
  EXPECT_NEAR(tv_loss(Var(d)).value()[0], oracle::tv(d), 1e-10);
  Tensor d3 = d;
  d3 *= 3.0;
  EXPECT_NEAR(tv_loss(Var(d3)).value()[0], 3.0 * tv_loss(Var(d)).value()[0], 1e-12);
}

TEST(LosLoss, TotalIsSumOfParts) {
  const Tensor target = histogram_from_logits(Var(randn({2, 2, 8}, 8))).value();
  const Var pred = histogram_from_logits(Var(randn({2, 2, 8}, 9)));
  const Var depth(randn({2, 2}, 10));
  const LosLossTerms zero = los_total_loss(pred, target, depth, 0.0);
  EXPECT_DOUBLE_EQ(zero.total.value()[0], zero.kl.value()[0]);
  const LosLossTerms t = los_total_loss(pred, target, depth, 1e-5);
  EXPECT_NEAR(t.total.value()[0], t.kl.value()[0] + 1e-5 * t.tv.value()[0], 1e-15);
  EXPECT_DOUBLE_EQ(LosModelConfig{}.gamma, 1e-5);
}

TEST(ReflectivityFilter, Examples) {
  DepthMap d(2, 2);
  IntensityImage flat(2, 2, 3.0);
  EXPECT_EQ(reflectivity_threshold_filter(d, flat).valid_count(), 4);
  IntensityImage img(2, 2);
  img.values = {0, 0, 2, 2};
  const DepthMap f = reflectivity_threshold_filter(d, img);
  EXPECT_EQ(f.valid, (std::vector<uint8_t>{0, 0, 1, 1}));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  IntensityImage r(5, 5);
  for (double& v : r.values) v = u(rng);
  double mean = 0.0;
  for (double v : r.values) mean += v / 25.0;
  const DepthMap fr = reflectivity_threshold_filter(DepthMap(5, 5), r);
  for (size_t i = 0; i < 25; ++i) EXPECT_EQ(fr.valid[i] != 0, !(r.values[i] < mean));
}

TEST(TargetHistogram, PeaksAtDepthBinAndInvalidIsUniform) {
  DepthMap d(1, 2);
  d.values = {40 * meters_per_bin(80.0), 0.0};
  d.valid = {1, 0};
  const Tensor h = los_target_histogram(d, PulseModel::gaussian(400, 80), 128, 80.0);
  int64_t best = 0;
  for (int64_t n = 1; n < 128; ++n)
    if (h[n] > h[best]) best = n;
  EXPECT_EQ(best, 40);
  EXPECT_NEAR(h[128 + 5], 1.0 / 128.0, 1e-15);
}

TEST(TrtLos, ExtractorShapeAndZeroTail) {
  LosModelConfig cfg = small_config(16);
  cfg.attention.window_temporal = 4;
  cfg.zero_init_extractor_tail = true;
  TrtLos model(cfg, 1);
  const Var fs = model.extract(Var(Tensor({32, 32, 128, 1}, 0.0)));
  EXPECT_EQ(fs.shape(), (Shape{16, 16, 16, 16}));
  EXPECT_EQ(fs.value().max_abs(), 0.0);
}

TEST(TrtLos, ForwardShapeContract) {
  TrtLos model(small_config(8), 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor cube({32, 32, 128});
  for (double& v : cube.values()) v = u(rng);
  const LosOutput out = model.forward(cube);
  EXPECT_EQ(out.histogram.shape(), (Shape{32, 32, 128}));
  EXPECT_EQ(out.depth.shape(), (Shape{32, 32}));
  EXPECT_THROW(model.forward(Tensor({30, 32, 128})), ShapeError);
}

TEST(TrtLos, GradientReachesEveryParameter) {
  TrtLos model(small_config(8), 4);
  const Tensor cube = randn({8, 8, 32}, 5);
  const LosOutput out = model.forward(normalize_input(cube));
  DepthMap d(8, 8);
  for (double& v : d.values) v = 0.3;
  const Tensor target = los_target_histogram(d, PulseModel::gaussian(400, 80), 32, 80.0);
  backward(los_total_loss(out.histogram, target, out.depth, 1e-2).total);
  for (const std::string& name : model.params().names()) {
    const Var p = model.params().get(name);
    ASSERT_FALSE(p.grad().empty()) << name;
    EXPECT_GT(p.grad().max_abs(), 0.0) << name;
  }
}

TEST(TrtLos, EndToEndGradcheck) {
  TrtLos model(small_config(8), 6);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor cube({8, 8, 32});
  for (double& v : cube.values()) v = u(rng);
  DepthMap d(8, 8);
  for (size_t i = 0; i < d.values.size(); ++i) d.values[i] = 0.2 + 0.02 * static_cast<double>(i % 9);
  const Tensor target = los_target_histogram(d, PulseModel::gaussian(400, 80), 32, 80.0);
  auto loss = [&]() {
    const LosOutput out = model.forward(cube);
    return los_total_loss(out.histogram, target, out.depth, 1e-2).total;
  };
  GradcheckOptions o;
  o.max_entries_per_leaf = 3;
  o.tolerance = 1e-3;
  const GradcheckResult r = check_gradients(loss, model.params().vars(), o);
  EXPECT_TRUE(r.passed) << r.max_rel_error << " at " << r.worst;
}

TEST(LosConfig, ValidationRules) {
  LosModelConfig cfg;
  cfg.temporal_shuffle = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = LosModelConfig{};
  cfg.spatial_down = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_NO_THROW(LosModelConfig{}.validate());
}
