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

#include "trtkit/gradcheck_suite.hpp"

#include <chrono>
#include <functional>
#include <json.hpp>
#include <memory>
#include <random>

#include "trtkit/attention.hpp"
#include "trtkit/conv.hpp"
#include "trtkit/error.hpp"
#include "trtkit/fk.hpp"
#include "trtkit/ops.hpp"
#include "trtkit/params.hpp"
#include "trtkit/trt_los.hpp"
#include "trtkit/trt_nlos.hpp"

namespace trtkit {

bool GradcheckReport::passed() const {
  for (const GradcheckEntry& e : entries)
    if (!e.result.passed) return false;
  return !entries.empty();
}

std::string GradcheckReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["seconds"] = seconds;
  j["entries"] = nlohmann::json::array();
  for (const GradcheckEntry& e : entries) {
    j["entries"].push_back({{"module", e.module},
                            {"name", e.name},
                            {"passed", e.result.passed},
                            {"max_rel_error", e.result.max_rel_error},
                            {"checked", e.result.checked},
                            {"worst", e.result.worst},
                            {"seconds", e.seconds}});
  }
  return j.dump(2);
}

const std::vector<std::string>& gradcheck_selectors() {
  static const std::vector<std::string> s{"all", "ops", "attention", "los", "nlos"};
  return s;
}

namespace {

using Fn = std::function<Var(const std::vector<Var>&)>;

class Suite {
 public:
  Suite(uint64_t seed, double corrupt) : rng_(seed), seed_(seed) {
    opts_.step = 1e-5;
    opts_.tolerance = 1e-4;
    opts_.max_entries_per_leaf = 12;
    opts_.seed = seed;
    opts_.corrupt = corrupt;
  }

  Tensor randn(const Shape& shape, double stddev = 1.0) {
    std::normal_distribution<double> d(0.0, stddev);
    Tensor t(shape);
    for (double& v : t.values()) v = d(rng_);
    return t;
  }

  Tensor rand(const Shape& shape, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Tensor t(shape);
    for (double& v : t.values()) v = d(rng_);
    return t;
  }

  uint64_t seed() const { return seed_; }

  /// Projects f(inputs) onto a fixed random tensor and checks gradients
  /// w.r.t. the inputs and `params`.
  void check(const std::string& module, const std::string& name, const std::vector<Tensor>& inputs, const Fn& f,
             const std::vector<Var>& params = {}) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Var> leaves;
    for (const Tensor& t : inputs) leaves.emplace_back(t, true);
    const size_t n_inputs = leaves.size();
    Tensor projection;
    {
      NoGradGuard guard;
      projection = randn(f(leaves).shape());
    }
    for (const Var& p : params) leaves.push_back(p);
    auto loss = [&]() {
      std::vector<Var> in(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(n_inputs));
      Var out = f(in);
      return out.size() == 1 && projection.size() == 1 ? scale(out, projection[0]) : dot_const(out, projection);
    };
    GradcheckEntry e;
    e.module = module;
    e.name = name;
    e.result = check_gradients(loss, leaves, opts_);
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    entries_.push_back(std::move(e));
  }

  std::vector<GradcheckEntry>& entries() { return entries_; }

 private:
  std::mt19937_64 rng_;
  uint64_t seed_;
  GradcheckOptions opts_;
  std::vector<GradcheckEntry> entries_;
};

std::vector<Var> with_prefix(const ParameterSet& ps, const std::vector<std::string>& prefixes) {
  std::vector<Var> out;
  for (const std::string& name : ps.names()) {
    for (const std::string& p : prefixes) {
      if (name.rfind(p, 0) == 0) {
        out.push_back(ps.get(name));
        break;
      }
    }
  }
  return out;
}

AttentionConfig small_attention(int channels) {
  AttentionConfig c;
  c.channels = channels;
  c.heads = 2;
  c.window_spatial = 2;
  c.window_temporal = 2;
  c.global_downsample = 2;
  c.stca_heads = 1;
  c.blocks = 1;
  return c;
}

void ops_suite(Suite& s) {
  const std::string m = "ops";
  s.check(m, "add_mul_sub", {s.randn({3, 4}), s.randn({3, 4})},
          [](const std::vector<Var>& x) { return sub(mul(add(x[0], x[1]), x[0]), x[1]); });
  s.check(m, "linear", {s.randn({2, 3, 4}), s.randn({4, 5}), s.randn({5})},
          [](const std::vector<Var>& x) { return linear(x[0], x[1], x[2]); });
  s.check(m, "bmm", {s.randn({2, 3, 4}), s.randn({2, 5, 4})},
          [](const std::vector<Var>& x) { return bmm(x[0], x[1], true); });
  s.check(m, "permute_reshape", {s.randn({2, 3, 4})},
          [](const std::vector<Var>& x) { return reshape(permute(x[0], {2, 0, 1}), {4, 6}); });
  s.check(m, "concat_last", {s.randn({2, 3}), s.randn({2, 2})},
          [](const std::vector<Var>& x) { return concat_last({x[0], x[1]}); });
  s.check(m, "gelu", {s.randn({16})}, [](const std::vector<Var>& x) { return gelu(x[0]); });
  s.check(m, "softplus", {s.randn({16})}, [](const std::vector<Var>& x) { return softplus(x[0]); });
  s.check(m, "leaky_relu", {s.randn({16})}, [](const std::vector<Var>& x) { return leaky_relu(x[0], 0.2); });
  s.check(m, "softmax_last", {s.randn({3, 5})}, [](const std::vector<Var>& x) { return softmax_last(x[0]); });
  s.check(m, "layer_norm_last", {s.randn({3, 6}), s.randn({6}), s.randn({6})},
          [](const std::vector<Var>& x) { return layer_norm_last(x[0], x[1], x[2]); });
  s.check(m, "normalize_last", {s.rand({3, 5}, 0.5, 2.0)},
          [](const std::vector<Var>& x) { return normalize_last(x[0]); });
  s.check(m, "avg_pool_spatial", {s.randn({4, 4, 2, 3})},
          [](const std::vector<Var>& x) { return avg_pool_spatial(x[0], 2); });
  s.check(m, "upsample_nearest_spatial", {s.randn({2, 2, 2, 3})},
          [](const std::vector<Var>& x) { return upsample_nearest_spatial(x[0], 2); });
  s.check(m, "max_last", {s.randn({3, 7})}, [](const std::vector<Var>& x) { return max_last(x[0]); });
  s.check(m, "l1_mean", {s.randn({12})}, [&](const std::vector<Var>& x) { return l1_mean(x[0], Tensor({12}, 0.05)); });

  Conv3dSpec strided;
  strided.stride = {2, 2, 2};
  strided.padding = {1, 1, 1};
  s.check(m, "conv3d_strided", {s.randn({4, 4, 8, 2}), s.randn({3, 3, 3, 2, 3}, 0.3), s.randn({3})},
          [strided](const std::vector<Var>& x) { return conv3d(x[0], x[1], x[2], strided); });
  s.check(m, "conv3d_dilated", {s.randn({4, 4, 8, 2}), s.randn({3, 3, 3, 2, 2}, 0.3), s.randn({2})},
          [](const std::vector<Var>& x) { return conv3d(x[0], x[1], x[2], Conv3dSpec::same(3, 2)); });
  s.check(m, "depthwise_conv3d", {s.randn({4, 4, 8, 3}), s.randn({3, 3, 3, 3}, 0.3), s.randn({3})},
          [](const std::vector<Var>& x) { return depthwise_conv3d(x[0], x[1], x[2], Conv3dSpec::same(3)); });
  Conv3dSpec up;
  up.stride = {1, 1, 2};
  up.padding = {0, 0, 1};
  s.check(m, "conv_transpose3d", {s.randn({4, 4, 4, 2}), s.randn({1, 1, 4, 2, 3}, 0.3), s.randn({3})},
          [up](const std::vector<Var>& x) { return conv_transpose3d(x[0], x[1], x[2], up); });
  s.check(m, "masked_l1_mean", {s.randn({4, 4})}, [&](const std::vector<Var>& x) {
    Tensor mask({4, 4}, 1.0);
    mask[3] = 0.0;
    mask[9] = 0.0;
    return masked_l1_mean(x[0], Tensor({4, 4}, 0.1), mask);
  });
}

void attention_suite(Suite& s) {
  const std::string m = "attention";
  const int c = 8;
  const AttentionConfig cfg = small_attention(c);
  ParameterSet ps;
  Initializer init(s.seed());
  const EncoderParams enc = make_encoder_params(ps, init, "enc", c);
  const DecoderParams dec = make_decoder_params(ps, init, "dec", c);
  const BlockParams b0 = make_block_params(ps, init, "blk", 0, c);
  const BlockParams b1 = make_block_params(ps, init, "blk", 1, c);

  s.check(m, "window_partition_roundtrip", {s.randn({4, 4, 4, 2})}, [](const std::vector<Var>& x) {
    Var w = window_partition_spatial(x[0], 2);
    Var t = window_partition_temporal(window_stitch_spatial(mul(w, w), 4, 4), 2);
    return window_stitch_temporal(t);
  });
  s.check(m, "msa", {s.randn({2, 6, c})}, [&](const std::vector<Var>& x) { return msa(x[0], enc.msa_s, 2); },
          with_prefix(ps, {"enc.msa_s."}));
  s.check(m, "ffn", {s.randn({4, c})}, [&](const std::vector<Var>& x) { return ffn_sublayer(x[0], enc.ffn); },
          with_prefix(ps, {"enc.ffn."}));
  s.check(m, "stsa_local", {s.randn({4, 4, 8, c})},
          [&](const std::vector<Var>& x) { return stsa_local(x[0], enc, cfg); }, with_prefix(ps, {"enc."}));
  s.check(m, "stsa_global", {s.randn({4, 4, 8, c})},
          [&](const std::vector<Var>& x) { return stsa_global(x[0], enc, cfg); }, with_prefix(ps, {"enc."}));
  s.check(m, "stca", {s.randn({4, 4, 4, c}), s.randn({4, 4, 4, c})},
          [&](const std::vector<Var>& x) { return stca(x[0], x[1], dec.stca_local, 1); },
          with_prefix(ps, {"dec.stca_local."}));
  for (Integration mode : {Integration::none, Integration::local, Integration::global, Integration::both}) {
    AttentionConfig mc = cfg;
    mc.integration = mode;
    s.check(m, std::string("decoder_") + integration_name(mode), {s.randn({4, 4, 4, c}), s.randn({2, 2, 4, c})},
            [&, mc](const std::vector<Var>& x) {
              auto [l, g] = stca_decoder(x[0], x[1], dec, mc);
              return concat_last({l, g});
            },
            with_prefix(ps, {"dec."}));
  }
  s.check(m, "trt_stack", {s.randn({4, 4, 4, c}, 0.5)},
          [&](const std::vector<Var>& x) {
            auto [l, g] = trt_stack(x[0], {b0, b1}, cfg);
            return concat_last({l, g});
          },
          with_prefix(ps, {"blk.1.fuse.", "blk.0.decoder.stca_local.", "blk.1.local.msa_t."}));
}

void los_suite(Suite& s) {
  const std::string m = "los";
  s.check(m, "temporal_pixelshuffle", {s.randn({2, 2, 3, 8})},
          [](const std::vector<Var>& x) { return temporal_pixelshuffle(x[0], 4); });
  s.check(m, "pixelshuffle_3d", {s.randn({2, 2, 2, 8})},
          [](const std::vector<Var>& x) { return pixelshuffle_3d(x[0], 2); });
  s.check(m, "pixelunshuffle_3d", {s.randn({4, 4, 4, 1})},
          [](const std::vector<Var>& x) { return pixelunshuffle_3d(x[0], 2); });
  s.check(m, "soft_argmax", {s.randn({3, 3, 8})},
          [](const std::vector<Var>& x) { return soft_argmax_depth(x[0], 0.7); });
  Tensor target = s.rand({2, 2, 8}, 0.1, 1.0);
  {
    Var t(target);
    target = normalize_last(t).value();
  }
  s.check(m, "kl", {s.randn({2, 2, 8})},
          [target](const std::vector<Var>& x) { return kl_loss(histogram_from_logits(x[0]), target); });
  s.check(m, "tv", {s.randn({4, 5})}, [](const std::vector<Var>& x) { return tv_loss(x[0]); });

  LosModelConfig cfg;
  cfg.attention = small_attention(8);
  TrtLos model(cfg, s.seed());
  const ParameterSet& ps = model.params();
  s.check(m, "extractor", {s.rand({8, 8, 16, 1}, 0.0, 1.0)},
          [&](const std::vector<Var>& x) { return model.extract(x[0]); }, with_prefix(ps, {"extract."}));
  s.check(m, "fusion_head", {s.randn({4, 4, 2, 8}), s.randn({4, 4, 2, 8})},
          [&](const std::vector<Var>& x) { return model.head(x[0], x[1]); }, with_prefix(ps, {"head."}));
  const Tensor cube = s.rand({8, 8, 16}, 0.0, 1.0);
  const PulseModel pulse = PulseModel::gaussian(300.0, 80.0);
  DepthMap depth(8, 8, DepthUnits::meters);
  for (size_t i = 0; i < depth.values.size(); ++i) depth.values[i] = 0.3 + 0.01 * static_cast<double>(i % 7);
  const Tensor hist = los_target_histogram(depth, pulse, 16, 80.0);
  s.check(m, "network_loss", {},
          [&](const std::vector<Var>&) {
            const LosOutput out = model.forward(cube);
            return los_total_loss(out.histogram, hist, out.depth, 1e-2).total;
          },
          with_prefix(ps, {"extract.pool.", "trt.0.local.ffn.", "head.local."}));
}

void nlos_suite(Suite& s) {
  const std::string m = "nlos";
  NlosModelConfig cfg;
  cfg.attention = small_attention(8);
  cfg.attention.window_temporal = 1;
  cfg.grid = 4;
  cfg.bins = 16;
  cfg.denoiser_channels = {2, 4, 4, 4};
  TrtNlos model(cfg, s.seed());
  const ParameterSet& ps = model.params();

  s.check(m, "denoiser", {s.rand({4, 4, 8, 1}, 0.0, 1.0)},
          [&](const std::vector<Var>& x) { return model.denoise(x[0]); }, with_prefix(ps, {"denoise."}));
  auto fk = std::make_shared<const FkMigration>(4, 8, 1.0, 132.0);
  s.check(m, "fk_migration", {s.randn({4, 4, 8, 2})},
          [fk](const std::vector<Var>& x) { return fk_migration(x[0], fk); });
  s.check(m, "shallow_extract", {s.rand({4, 4, 16, 1}, 0.0, 1.0)},
          [&](const std::vector<Var>& x) {
            auto [star, shallow] = model.shallow_extract(x[0]);
            return concat_last({reshape(star, {star.size()}), reshape(shallow, {shallow.size()})});
          },
          with_prefix(ps, {"extract.down.0.", "enhance.merge."}));
  s.check(m, "fusion", {s.randn({4, 4, 4, 8}), s.randn({4, 4, 2, 8}), s.randn({4, 4, 2, 8})},
          [&](const std::vector<Var>& x) { return model.fuse(x[0], x[1], x[2]); }, with_prefix(ps, {"fuse."}));
  s.check(m, "max_projection", {s.randn({4, 4, 6})},
          [](const std::vector<Var>& x) { return max_projection(x[0]).first; });
  const Tensor meas = s.rand({4, 4, 8, 1}, 0.0, 1.0);
  const Tensor inten = s.rand({4, 4}, 0.0, 1.0);
  const Tensor dgt = s.rand({4, 4}, 0.0, 3.0);
  Tensor mask({4, 4}, 1.0);
  mask[5] = 0.0;
  s.check(m, "losses", {s.rand({4, 4, 8, 1}, 0.0, 1.0), s.rand({4, 4}, 0.0, 1.0), s.rand({4, 4}, 0.0, 3.0)},
          [&](const std::vector<Var>& x) {
            return nlos_losses(x[0], meas, x[1], inten, x[2], dgt, mask, 1.0, 1.0).total;
          });
  const Tensor cube = s.rand({4, 4, 16}, 0.0, 1.0);
  s.check(m, "network_soft_depth", {},
          [&](const std::vector<Var>&) { return model.forward(cube).soft_depth; },
          with_prefix(ps, {"fuse.out.", "trt.0.global.ffn.fc2.", "denoise.conv.0."}));
}

}  // namespace

GradcheckReport run_gradcheck_suite(const std::string& selector, uint64_t seed, double corrupt) {
  bool known = false;
  for (const std::string& s : gradcheck_selectors()) known = known || s == selector;
  if (!known) throw ConfigError("unknown gradcheck selector " + selector);
  const auto start = std::chrono::steady_clock::now();
  Suite suite(seed, corrupt);
  const bool all = selector == "all";
  if (all || selector == "ops") ops_suite(suite);
  if (all || selector == "attention") attention_suite(suite);
  if (all || selector == "los") los_suite(suite);
  if (all || selector == "nlos") nlos_suite(suite);
  GradcheckReport report;
  report.entries = std::move(suite.entries());
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace trtkit
