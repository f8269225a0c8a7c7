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
#include <filesystem>
#include <fstream>
#include <random>

#include "trtkit/autograd.hpp"
#include "trtkit/checkpoint.hpp"
#include "trtkit/conv.hpp"
#include "trtkit/error.hpp"
#include "trtkit/gradcheck.hpp"
#include "trtkit/ops.hpp"
#include "trtkit/optimizer.hpp"
#include "trtkit/params.hpp"

using namespace trtkit;
namespace fs = std::filesystem;

namespace {

Tensor random_tensor(const Shape& s, uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Tensor t(s);
  for (double& v : t.values()) v = d(rng);
  return t;
}

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "trtkit_unit";
  fs::create_directories(dir);
  return dir / name;
}

// Direct 3-D convolution, channel-last, zero padding.
Tensor naive_conv3d(const Tensor& x, const Tensor& w, const Tensor& b, const Conv3dSpec& s) {
  const int64_t H = x.dim(0), W = x.dim(1), T = x.dim(2), Ci = x.dim(3);
  const int64_t kh = w.dim(0), kw = w.dim(1), kt = w.dim(2), Co = w.dim(4);
  auto out_dim = [](int64_t n, int64_t k, int st, int pad, int dil) { return (n + 2 * pad - dil * (k - 1) - 1) / st + 1; };
  const int64_t Ho = out_dim(H, kh, s.stride[0], s.padding[0], s.dilation[0]);
  const int64_t Wo = out_dim(W, kw, s.stride[1], s.padding[1], s.dilation[1]);
  const int64_t To = out_dim(T, kt, s.stride[2], s.padding[2], s.dilation[2]);
  Tensor y({Ho, Wo, To, Co});
  for (int64_t i = 0; i < Ho; ++i)
    for (int64_t j = 0; j < Wo; ++j)
      for (int64_t t = 0; t < To; ++t)
        for (int64_t o = 0; o < Co; ++o) {
          double acc = b.empty() ? 0.0 : b[o];
          for (int64_t a = 0; a < kh; ++a)
            for (int64_t c = 0; c < kw; ++c)
              for (int64_t e = 0; e < kt; ++e) {
                const int64_t hi = i * s.stride[0] - s.padding[0] + a * s.dilation[0];
                const int64_t wi = j * s.stride[1] - s.padding[1] + c * s.dilation[1];
                const int64_t ti = t * s.stride[2] - s.padding[2] + e * s.dilation[2];
                if (hi < 0 || hi >= H || wi < 0 || wi >= W || ti < 0 || ti >= T) continue;
                for (int64_t ci = 0; ci < Ci; ++ci) acc += x.at({hi, wi, ti, ci}) * w.at({a, c, e, ci, o});
              }
          y.at({i, j, t, o}) = acc;
        }
  return y;
}

}  // namespace

TEST(Tensor, ShapeAndIndexing) {
  Tensor t({2, 3, 4}, 1.5);
  EXPECT_EQ(t.size(), 24);
  EXPECT_EQ(t.rank(), 3);
  t.at({1, 2, 3}) = 7.0;
  EXPECT_DOUBLE_EQ(t[23], 7.0);
  EXPECT_THROW(t.reshaped({5, 5}), ShapeError);
  EXPECT_EQ(t.reshaped({6, 4}).shape(), (Shape{6, 4}));
}

TEST(Autograd, ChainRuleOnProduct) {
  Var a(Tensor({2}, std::vector<double>{2.0, 3.0}), true);
  Var b(Tensor({2}, std::vector<double>{5.0, -1.0}), true);
  backward(sum_all(mul(mul(a, a), b)));  // sum a^2 b
  EXPECT_DOUBLE_EQ(a.grad()[0], 2 * 2.0 * 5.0);
  EXPECT_DOUBLE_EQ(a.grad()[1], 2 * 3.0 * -1.0);
  EXPECT_DOUBLE_EQ(b.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(b.grad()[1], 9.0);
}

TEST(Autograd, GradientsAccumulateAcrossSharedUses) {
  Var a(Tensor({1}, 3.0), true);
  backward(add(a, add(a, a)));
  EXPECT_DOUBLE_EQ(a.grad()[0], 3.0);
}

TEST(Autograd, NoGradGuardDropsTape) {
  Var a(Tensor({1}, 3.0), true);
  NoGradGuard guard;
  Var y = mul(a, a);
  EXPECT_FALSE(y.requires_grad());
}

TEST(Ops, SoftmaxRowsSumToOne) {
  Var x(random_tensor({5, 7}, 1, -20, 20));
  const Tensor p = softmax_last(x).value();
  for (int r = 0; r < 5; ++r) {
    double s = 0.0;
    for (int c = 0; c < 7; ++c) s += p[r * 7 + c];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Ops, PermuteMatchesIndexMap) {
  const Tensor x = random_tensor({2, 3, 4}, 2);
  const Tensor y = permute(Var(x), {2, 0, 1}).value();
  ASSERT_EQ(y.shape(), (Shape{4, 2, 3}));
  for (int64_t i = 0; i < 2; ++i)
    for (int64_t j = 0; j < 3; ++j)
      for (int64_t k = 0; k < 4; ++k) EXPECT_EQ(y.at({k, i, j}), x.at({i, j, k}));
}

TEST(Ops, MatmulMatchesLoops) {
  const Tensor a = random_tensor({3, 4}, 3), b = random_tensor({4, 5}, 4);
  const Tensor c = matmul(Var(a), Var(b)).value();
  for (int64_t i = 0; i < 3; ++i)
    for (int64_t j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (int64_t k = 0; k < 4; ++k) acc += a.at({i, k}) * b.at({k, j});
      EXPECT_NEAR(c.at({i, j}), acc, 1e-12);
    }
}

TEST(Ops, PoolAndUpsampleAreAdjointUpToScale) {
  const Tensor x = random_tensor({4, 4, 2, 3}, 5);
  const Tensor y = random_tensor({2, 2, 2, 3}, 6);
  const Tensor px = avg_pool_spatial(Var(x), 2).value();
  const Tensor uy = upsample_nearest_spatial(Var(y), 2).value();
  double lhs = 0.0, rhs = 0.0;
  for (int64_t i = 0; i < px.size(); ++i) lhs += px[i] * y[i];
  for (int64_t i = 0; i < x.size(); ++i) rhs += x[i] * uy[i];
  EXPECT_NEAR(lhs, rhs / 4.0, 1e-12);
}

TEST(Ops, ShapeMismatchThrows) {
  EXPECT_THROW(add(Var(Tensor({2, 3})), Var(Tensor({3, 2}))), ShapeError);
  EXPECT_THROW(matmul(Var(Tensor({2, 3})), Var(Tensor({2, 3}))), ShapeError);
}

struct ConvCase {
  Shape input;
  Shape weight;
  Conv3dSpec spec;
};

class ConvOracle : public ::testing::TestWithParam<int> {};

TEST_P(ConvOracle, MatchesDirectLoops) {
  Conv3dSpec strided;
  strided.stride = {2, 1, 2};
  strided.padding = {1, 0, 1};
  Conv3dSpec dilated = Conv3dSpec::same(3, 2);
  Conv3dSpec pool;
  pool.stride = {1, 1, 4};
  const ConvCase cases[] = {{{5, 4, 6, 2}, {3, 3, 3, 2, 3}, Conv3dSpec::same()},
                            {{6, 5, 8, 3}, {3, 2, 3, 3, 2}, strided},
                            {{4, 4, 8, 2}, {3, 3, 3, 2, 2}, dilated},
                            {{3, 3, 8, 4}, {1, 1, 4, 4, 2}, pool}};
  const ConvCase& c = cases[GetParam()];
  const Tensor x = random_tensor(c.input, 10 + GetParam());
  const Tensor w = random_tensor(c.weight, 20 + GetParam());
  const Tensor b = random_tensor({c.weight[4]}, 30 + GetParam());
  const Tensor got = conv3d(Var(x), Var(w), Var(b), c.spec).value();
  const Tensor want = naive_conv3d(x, w, b, c.spec);
  ASSERT_EQ(got.shape(), want.shape());
  for (int64_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Cases, ConvOracle, ::testing::Range(0, 4));

TEST(Conv, DepthwiseMatchesPerChannelConv) {
  const Tensor x = random_tensor({4, 4, 6, 3}, 40);
  const Tensor w = random_tensor({3, 3, 3, 3}, 41);
  const Tensor got = depthwise_conv3d(Var(x), Var(w), Var(), Conv3dSpec::same()).value();
  Tensor dense({3, 3, 3, 3, 3}, 0.0);
  for (int64_t a = 0; a < 3; ++a)
    for (int64_t b = 0; b < 3; ++b)
      for (int64_t e = 0; e < 3; ++e)
        for (int64_t c = 0; c < 3; ++c) dense.at({a, b, e, c, c}) = w.at({a, b, e, c});
  const Tensor want = naive_conv3d(x, dense, Tensor(), Conv3dSpec::same());
  for (int64_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(Conv, TransposeIsAdjointOfConv) {
  Conv3dSpec s;
  s.stride = {2, 1, 2};
  s.padding = {1, 0, 1};
  const Tensor x = random_tensor({5, 5, 8, 2}, 50);
  const Tensor w = random_tensor({3, 3, 4, 2, 3}, 51);
  const Tensor y = conv3d(Var(x), Var(w), Var(), s).value();
  const Tensor r = random_tensor(y.shape(), 52);
  // conv_transpose3d takes weight (kh, kw, kt, Cin=r channels, Cout=x channels).
  Tensor wt({3, 3, 4, 3, 2});
  for (int64_t a = 0; a < 3; ++a)
    for (int64_t b = 0; b < 3; ++b)
      for (int64_t e = 0; e < 4; ++e)
        for (int64_t i = 0; i < 2; ++i)
          for (int64_t o = 0; o < 3; ++o) wt.at({a, b, e, o, i}) = w.at({a, b, e, i, o});
  const Tensor back = conv_transpose3d(Var(r), Var(wt), Var(), s).value();
  ASSERT_EQ(back.shape(), x.shape());
  double lhs = 0.0, rhs = 0.0;
  for (int64_t i = 0; i < y.size(); ++i) lhs += y[i] * r[i];
  for (int64_t i = 0; i < x.size(); ++i) rhs += x[i] * back[i];
  EXPECT_NEAR(lhs, rhs, 1e-9);
}

TEST(Gradcheck, PassesOnSmoothFunctionAndCatchesCorruption) {
  auto f = [](const std::vector<Var>& x) { return gelu(matmul(x[0], x[1])); };
  const std::vector<Tensor> in{random_tensor({3, 4}, 60), random_tensor({4, 2}, 61)};
  EXPECT_TRUE(gradcheck(f, in).passed);
  GradcheckOptions bad;
  bad.corrupt = 0.5;
  EXPECT_FALSE(gradcheck(f, in, bad).passed);
}

TEST(Params, NamesShapesAndInitBounds) {
  ParameterSet ps;
  Initializer init(1);
  const LinearLayer l = make_linear(ps, init, "fc", 16, 8);
  EXPECT_TRUE(ps.contains("fc.weight"));
  EXPECT_TRUE(ps.contains("fc.bias"));
  EXPECT_EQ(ps.get("fc.weight").shape(), (Shape{16, 8}));
  EXPECT_LE(l.weight.value().max_abs(), 0.25 + 1e-12);
  EXPECT_EQ(ps.element_count(), 16 * 8 + 8);
  EXPECT_THROW(make_linear(ps, init, "fc", 2, 2), ConfigError);
}

TEST(AdamW, FirstStepMatchesHandComputation) {
  ParameterSet ps;
  Var p = ps.add("p", Tensor({2}, std::vector<double>{1.0, -2.0}));
  AdamWOptions o;
  o.lr = 0.1;
  o.weight_decay = 0.01;
  AdamW opt(ps, o);
  backward(sum_all(mul(p, p)));  // grad = 2p
  opt.step();
  // Bias-corrected first step moves by lr * g / (|g| + eps) after decay.
  for (int i = 0; i < 2; ++i) {
    const double p0 = i == 0 ? 1.0 : -2.0;
    const double g = 2 * p0;
    const double expect = p0 - 0.1 * 0.01 * p0 - 0.1 * g / (std::abs(g) + 1e-8);
    EXPECT_NEAR(p.value()[i], expect, 1e-12);
  }
  EXPECT_TRUE(p.grad().empty());
}

TEST(AdamW, ConvergesOnQuadratic) {
  ParameterSet ps;
  Var p = ps.add("p", Tensor({3}, std::vector<double>{3.0, -1.0, 2.0}));
  AdamWOptions o;
  o.lr = 0.05;
  o.weight_decay = 0.0;
  AdamW opt(ps, o);
  for (int i = 0; i < 500; ++i) {
    backward(sum_all(mul(p, p)));
    opt.step();
  }
  EXPECT_LT(p.value().max_abs(), 1e-2);
}

TEST(AdamW, NonFiniteGradientThrows) {
  ParameterSet ps;
  Var p = ps.add("p", Tensor({1}, 1.0));
  AdamW opt(ps, {});
  p.mutable_grad()[0] = std::nan("");
  EXPECT_THROW(opt.step(), NumericalError);
}

TEST(Checkpoint, RoundTripAndRestore) {
  ParameterSet ps;
  Initializer init(3);
  make_linear(ps, init, "a", 3, 4);
  make_layer_norm(ps, "n", 4);
  ps.round_to_float();
  const fs::path path = temp_path("ckpt.trtk");
  save_checkpoint(path, ps, "{\"k\":1}", "{\"epoch\":2}");
  const CheckpointData d = load_checkpoint(path);
  EXPECT_EQ(d.tensors.size(), 4u);
  ParameterSet other;
  Initializer init2(99);
  make_linear(other, init2, "a", 3, 4);
  make_layer_norm(other, "n", 4);
  restore_parameters(d, other);
  for (const std::string& name : ps.names()) {
    const Tensor& a = ps.get(name).value();
    const Tensor& b = other.get(name).value();
    for (int64_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  }
  ParameterSet wrong;
  make_linear(wrong, init2, "a", 3, 5);
  make_layer_norm(wrong, "n", 4);
  EXPECT_THROW(restore_parameters(d, wrong), Error);
}

TEST(Checkpoint, RejectsBadMagicAndTruncation) {
  const fs::path bad = temp_path("bad.trtk");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "XXXX0000000000000000";
  }
  EXPECT_THROW(load_checkpoint(bad), FormatError);
  ParameterSet ps;
  Initializer init(3);
  make_linear(ps, init, "a", 3, 4);
  const fs::path good = temp_path("trunc.trtk");
  save_checkpoint(good, ps, "{}");
  fs::resize_file(good, fs::file_size(good) - 4);
  EXPECT_THROW(load_checkpoint(good), FormatError);
}
