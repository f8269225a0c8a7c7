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

#include "trtkit/attention.hpp"

#include <cmath>

#include "trtkit/error.hpp"
#include "trtkit/ops.hpp"

namespace trtkit {

const char* integration_name(Integration mode) {
  switch (mode) {
    case Integration::none: return "NoInt";
    case Integration::local: return "LocInt";
    case Integration::global: return "GloInt";
    case Integration::both: return "LGInt";
  }
  return "?";
}

Integration parse_integration(const std::string& name) {
  if (name == "NoInt" || name == "none") return Integration::none;
  if (name == "LocInt" || name == "local") return Integration::local;
  if (name == "GloInt" || name == "global") return Integration::global;
  if (name == "LGInt" || name == "both") return Integration::both;
  throw ConfigError("unknown integration mode " + name);
}

void AttentionConfig::validate() const {
  if (channels < 1 || heads < 1 || stca_heads < 1) throw ConfigError("channels and heads must be positive");
  if (channels % heads != 0) throw ConfigError("channels must be divisible by heads");
  if (channels % stca_heads != 0) throw ConfigError("channels must be divisible by cross-attention heads");
  if (window_spatial < 1 || window_temporal < 1 || global_downsample < 1) throw ConfigError("window sizes must be positive");
  if (blocks < 1) throw ConfigError("at least one block is required");
}

void AttentionConfig::check_volume(const Shape& s) const {
  if (s.size() != 4 || s[3] != channels) {
    throw ShapeError("feature volume " + shape_string(s) + " does not match " + std::to_string(channels) + " channels");
  }
  if (s[0] % window_spatial != 0 || s[1] % window_spatial != 0) {
    throw ShapeError("spatial dims of " + shape_string(s) + " not divisible by window " + std::to_string(window_spatial));
  }
  if (s[2] % window_temporal != 0) {
    throw ShapeError("temporal dim of " + shape_string(s) + " not divisible by window " + std::to_string(window_temporal));
  }
  if (s[0] % global_downsample != 0 || s[1] % global_downsample != 0) {
    throw ShapeError("spatial dims of " + shape_string(s) + " not divisible by downsample " +
                     std::to_string(global_downsample));
  }
}

Var window_partition_spatial(const Var& x, int p) {
  const Shape& s = x.shape();
  if (s.size() != 4) throw ShapeError("window_partition_spatial expects (H, W, T, C)");
  if (p < 1 || s[0] % p != 0 || s[1] % p != 0) throw ShapeError("spatial dims not divisible by window");
  Var y = reshape(x, {s[0] / p, p, s[1] / p, p, s[2], s[3]});
  y = permute(y, {0, 2, 1, 3, 4, 5});
  return reshape(y, {(s[0] / p) * (s[1] / p), p, p, s[2], s[3]});
}

Var window_stitch_spatial(const Var& windows, int64_t height, int64_t width) {
  const Shape& s = windows.shape();
  if (s.size() != 5 || s[1] != s[2]) throw ShapeError("window_stitch_spatial expects (N, P, P, T, C)");
  const int64_t p = s[1];
  if (height % p != 0 || width % p != 0 || (height / p) * (width / p) != s[0]) {
    throw ShapeError("window count does not tile the requested extent");
  }
  Var y = reshape(windows, {height / p, width / p, p, p, s[3], s[4]});
  y = permute(y, {0, 2, 1, 3, 4, 5});
  return reshape(y, {height, width, s[3], s[4]});
}

Var window_partition_temporal(const Var& x, int pt) {
  const Shape& s = x.shape();
  if (s.size() != 4) throw ShapeError("window_partition_temporal expects (H, W, T, C)");
  if (pt < 1 || s[2] % pt != 0) throw ShapeError("temporal dim not divisible by window");
  Var y = reshape(x, {s[0], s[1], s[2] / pt, pt, s[3]});
  return permute(y, {2, 0, 1, 3, 4});
}

Var window_stitch_temporal(const Var& windows) {
  const Shape& s = windows.shape();
  if (s.size() != 5) throw ShapeError("window_stitch_temporal expects (N, H, W, P, C)");
  Var y = permute(windows, {1, 2, 0, 3, 4});
  return reshape(y, {s[1], s[2], s[0] * s[3], s[4]});
}

namespace {

// (B, L, E) -> (B * heads, L, E / heads).
Var split_heads(const Var& x, int heads) {
  const Shape& s = x.shape();
  if (heads == 1) return x;
  Var y = reshape(x, {s[0], s[1], heads, s[2] / heads});
  y = permute(y, {0, 2, 1, 3});
  return reshape(y, {s[0] * heads, s[1], s[2] / heads});
}

Var merge_heads(const Var& x, int heads) {
  if (heads == 1) return x;
  const Shape& s = x.shape();
  Var y = reshape(x, {s[0] / heads, heads, s[1], s[2]});
  y = permute(y, {0, 2, 1, 3});
  return reshape(y, {s[0] / heads, s[1], heads * s[2]});
}

Var attend(const Var& q, const Var& k, const Var& v) {
  const double scale_factor = 1.0 / std::sqrt(static_cast<double>(q.shape()[2]));
  Var scores = scale(bmm(q, k, true), scale_factor);
  return bmm(softmax_last(scores), v);
}

void check_tokens(const Var& tokens, const MsaParams& p, int heads) {
  const Shape& s = tokens.shape();
  if (s.size() != 3) throw ShapeError("msa expects tokens (B, L, E)");
  if (heads < 1 || s[2] % heads != 0) throw ConfigError("embedding not divisible by heads");
  if (p.q.weight.shape()[0] != s[2]) throw ShapeError("msa projection does not match embedding");
  if (!tokens.value().all_finite()) throw NumericalError("msa: non-finite input");
}

}  // namespace

Var msa(const Var& tokens, const MsaParams& p, int heads) {
  check_tokens(tokens, p, heads);
  Var q = split_heads(p.q(tokens), heads);
  Var k = split_heads(p.k(tokens), heads);
  Var v = split_heads(p.v(tokens), heads);
  return p.out(merge_heads(attend(q, k, v), heads));
}

Tensor msa_attention_map(const Tensor& tokens, const MsaParams& p, int heads) {
  NoGradGuard guard;
  Var t(tokens);
  check_tokens(t, p, heads);
  Var q = split_heads(p.q(t), heads);
  Var k = split_heads(p.k(t), heads);
  const double scale_factor = 1.0 / std::sqrt(static_cast<double>(q.shape()[2]));
  return softmax_last(scale(bmm(q, k, true), scale_factor)).value();
}

Var ffn_sublayer(const Var& x, const FfnParams& p) { return add(x, p.fc2(gelu(p.fc1(p.norm(x))))); }

namespace {

Var local_spatial(const Var& x, const EncoderParams& p, const AttentionConfig& cfg) {
  const Shape s = x.shape();
  const int64_t ps = cfg.window_spatial;
  const int64_t nh = s[0] / ps, nw = s[1] / ps;
  Var y = reshape(p.norm_s(x), {nh, ps, nw, ps, s[2], s[3]});
  y = reshape(permute(y, {0, 2, 4, 1, 3, 5}), {nh * nw * s[2], ps * ps, s[3]});
  y = msa(y, p.msa_s, cfg.heads);
  y = permute(reshape(y, {nh, nw, s[2], ps, ps, s[3]}), {0, 3, 1, 4, 2, 5});
  return add(x, reshape(y, s));
}

Var local_temporal(const Var& x, const EncoderParams& p, const AttentionConfig& cfg) {
  const Shape s = x.shape();
  const int64_t pt = cfg.window_temporal;
  Var y = reshape(p.norm_t(x), {s[0] * s[1] * (s[2] / pt), pt, s[3]});
  y = msa(y, p.msa_t, cfg.heads);
  return add(x, reshape(y, s));
}

Var full_spatial(const Var& x, const EncoderParams& p, const AttentionConfig& cfg) {
  const Shape s = x.shape();
  Var y = permute(p.norm_s(x), {2, 0, 1, 3});
  y = msa(reshape(y, {s[2], s[0] * s[1], s[3]}), p.msa_s, cfg.heads);
  y = permute(reshape(y, {s[2], s[0], s[1], s[3]}), {1, 2, 0, 3});
  return add(x, y);
}

Var full_temporal(const Var& x, const EncoderParams& p, const AttentionConfig& cfg) {
  const Shape s = x.shape();
  Var y = reshape(p.norm_t(x), {s[0] * s[1], s[2], s[3]});
  y = msa(y, p.msa_t, cfg.heads);
  return add(x, reshape(y, s));
}

}  // namespace

Var stsa_local(const Var& x, const EncoderParams& p, const AttentionConfig& cfg) {
  cfg.check_volume(x.shape());
  Var y = x;
  if (cfg.spatial_attention) y = local_spatial(y, p, cfg);
  if (cfg.temporal_attention) y = local_temporal(y, p, cfg);
  return ffn_sublayer(y, p.ffn);
}

Var stsa_global(const Var& x, const EncoderParams& p, const AttentionConfig& cfg) {
  cfg.check_volume(x.shape());
  Var y = cfg.global_downsample > 1 ? avg_pool_spatial(x, cfg.global_downsample) : x;
  if (cfg.spatial_attention) y = full_spatial(y, p, cfg);
  if (cfg.temporal_attention) y = full_temporal(y, p, cfg);
  return ffn_sublayer(y, p.ffn);
}

namespace {

// (H, W, T, C) -> (heads, HW, T * C / heads).
Var to_spatial_tokens(const Var& x, int heads) {
  const Shape& s = x.shape();
  const int64_t hw = s[0] * s[1], d = s[3] / heads;
  if (heads == 1) return reshape(x, {1, hw, s[2] * s[3]});
  Var y = permute(reshape(x, {hw, s[2], heads, d}), {2, 0, 1, 3});
  return reshape(y, {heads, hw, s[2] * d});
}

Var from_spatial_tokens(const Var& x, const Shape& s, int heads) {
  if (heads == 1) return reshape(x, s);
  const int64_t hw = s[0] * s[1], d = s[3] / heads;
  Var y = permute(reshape(x, {heads, hw, s[2], d}), {1, 2, 0, 3});
  return reshape(y, s);
}

// (H, W, T, C) -> (heads, T, HW * C / heads).
Var to_temporal_tokens(const Var& x, int heads) {
  const Shape& s = x.shape();
  const int64_t hw = s[0] * s[1], d = s[3] / heads;
  Var y = permute(reshape(x, {hw, s[2], heads, d}), {2, 1, 0, 3});
  return reshape(y, {heads, s[2], hw * d});
}

Var from_temporal_tokens(const Var& x, const Shape& s, int heads) {
  const int64_t hw = s[0] * s[1], d = s[3] / heads;
  Var y = permute(reshape(x, {heads, s[2], hw, d}), {2, 1, 0, 3});
  return reshape(y, s);
}

}  // namespace

Var stca(const Var& query, const Var& kv, const StcaParams& p, int heads) {
  const Shape s = query.shape();
  if (s.size() != 4 || kv.shape() != s) {
    throw ShapeError("stca: query " + shape_string(s) + " and key/value " + shape_string(kv.shape()) + " differ");
  }
  if (heads < 1 || s[3] % heads != 0) throw ConfigError("stca: channels not divisible by heads");
  Var qn = p.norm_q(query);
  Var kvn = p.norm_kv(kv);
  Var q = p.q(qn);
  Var k = p.k(kvn);
  Var v = p.v(kvn);
  Var stage1 = from_spatial_tokens(
      attend(to_spatial_tokens(q, heads), to_spatial_tokens(k, heads), to_spatial_tokens(v, heads)), s, heads);
  Var k2 = p.k2(stage1);
  Var v2 = p.v2(stage1);
  Var stage2 = from_temporal_tokens(
      attend(to_temporal_tokens(q, heads), to_temporal_tokens(k2, heads), to_temporal_tokens(v2, heads)), s, heads);
  return add(query, stage2);
}

std::pair<Var, Var> stca_decoder(const Var& local, const Var& global, const DecoderParams& p,
                                 const AttentionConfig& cfg) {
  const Shape& ls = local.shape();
  const Shape& gs = global.shape();
  const int sf = cfg.global_downsample;
  if (ls.size() != 4 || gs.size() != 4 || gs[0] * sf != ls[0] || gs[1] * sf != ls[1] || gs[2] != ls[2] ||
      gs[3] != ls[3]) {
    throw ShapeError("stca_decoder: global " + shape_string(gs) + " is not local " + shape_string(ls) +
                     " downsampled by " + std::to_string(sf));
  }
  Var up = sf > 1 ? upsample_nearest_spatial(global, sf) : global;
  const bool mix_local = cfg.integration == Integration::local || cfg.integration == Integration::both;
  const bool mix_global = cfg.integration == Integration::global || cfg.integration == Integration::both;
  Var a = mix_local ? stca(up, local, p.stca_local, cfg.stca_heads) : local;
  Var b = mix_global ? stca(local, up, p.stca_global, cfg.stca_heads) : up;
  return {ffn_sublayer(a, p.ffn_local), ffn_sublayer(b, p.ffn_global)};
}

namespace {

MsaParams make_msa(ParameterSet& ps, Initializer& init, const std::string& prefix, int c) {
  return {make_linear(ps, init, prefix + ".q", c, c), make_linear(ps, init, prefix + ".k", c, c),
          make_linear(ps, init, prefix + ".v", c, c), make_linear(ps, init, prefix + ".out", c, c)};
}

FfnParams make_ffn(ParameterSet& ps, Initializer& init, const std::string& prefix, int c) {
  return {make_layer_norm(ps, prefix + ".norm", c), make_linear(ps, init, prefix + ".fc1", c, 4 * c),
          make_linear(ps, init, prefix + ".fc2", 4 * c, c)};
}

StcaParams make_stca(ParameterSet& ps, Initializer& init, const std::string& prefix, int c) {
  return {make_layer_norm(ps, prefix + ".norm_q", c), make_layer_norm(ps, prefix + ".norm_kv", c),
          make_linear(ps, init, prefix + ".q", c, c),     make_linear(ps, init, prefix + ".k", c, c),
          make_linear(ps, init, prefix + ".v", c, c),     make_linear(ps, init, prefix + ".k2", c, c),
          make_linear(ps, init, prefix + ".v2", c, c)};
}

}  // namespace

EncoderParams make_encoder_params(ParameterSet& ps, Initializer& init, const std::string& prefix, int c) {
  EncoderParams p;
  p.norm_s = make_layer_norm(ps, prefix + ".norm_s", c);
  p.msa_s = make_msa(ps, init, prefix + ".msa_s", c);
  p.norm_t = make_layer_norm(ps, prefix + ".norm_t", c);
  p.msa_t = make_msa(ps, init, prefix + ".msa_t", c);
  p.ffn = make_ffn(ps, init, prefix + ".ffn", c);
  return p;
}

DecoderParams make_decoder_params(ParameterSet& ps, Initializer& init, const std::string& prefix, int c) {
  DecoderParams p;
  p.stca_local = make_stca(ps, init, prefix + ".stca_local", c);
  p.ffn_local = make_ffn(ps, init, prefix + ".ffn_local", c);
  p.stca_global = make_stca(ps, init, prefix + ".stca_global", c);
  p.ffn_global = make_ffn(ps, init, prefix + ".ffn_global", c);
  return p;
}

BlockParams make_block_params(ParameterSet& ps, Initializer& init, const std::string& prefix, int index, int c) {
  const std::string base = prefix + "." + std::to_string(index);
  BlockParams p;
  if (index > 0) p.fuse = make_linear(ps, init, base + ".fuse", 2 * c, c);
  p.local = make_encoder_params(ps, init, base + ".local", c);
  p.global = make_encoder_params(ps, init, base + ".global", c);
  p.decoder = make_decoder_params(ps, init, base + ".decoder", c);
  return p;
}

std::pair<Var, Var> trt_block(const Var& shallow, const BlockParams& p, const AttentionConfig& cfg) {
  Var local = stsa_local(shallow, p.local, cfg);
  Var global = stsa_global(shallow, p.global, cfg);
  return stca_decoder(local, global, p.decoder, cfg);
}

std::pair<Var, Var> trt_stack(const Var& shallow, const std::vector<BlockParams>& blocks, const AttentionConfig& cfg) {
  if (blocks.empty()) throw ConfigError("trt_stack: no blocks");
  std::pair<Var, Var> out = trt_block(shallow, blocks[0], cfg);
  for (size_t i = 1; i < blocks.size(); ++i) {
    if (!blocks[i].fuse.weight.defined()) throw ConfigError("trt_stack: block " + std::to_string(i) + " lacks fusion");
    Var carried = blocks[i].fuse(concat_last({out.first, out.second}));
    out = trt_block(carried, blocks[i], cfg);
  }
  return out;
}

}  // namespace trtkit
