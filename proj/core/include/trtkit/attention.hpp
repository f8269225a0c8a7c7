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

#include <string>
#include <utility>
#include <vector>

#include "trtkit/params.hpp"

namespace trtkit {

/// How the decoder mixes local and global features.
enum class Integration { none, local, global, both };

const char* integration_name(Integration mode);
Integration parse_integration(const std::string& name);

struct AttentionConfig {
  int channels = 64;
  int heads = 4;
  int window_spatial = 4;   // P_s
  int window_temporal = 4;  // P_t
  int global_downsample = 2;  // S
  int stca_heads = 1;
  int blocks = 12;
  /// Attention sublayers along each axis; disabling one skips it in both encoders.
  bool spatial_attention = true;
  bool temporal_attention = true;
  Integration integration = Integration::both;

  void validate() const;
  /// Throws ShapeError unless an (H, W, T, C) volume fits the windows.
  void check_volume(const Shape& shape) const;
};

// Window partitions of (H, W, T, C) volumes.
/// (N_s, P, P, T, C) with windows ordered row-major over the (H/P, W/P) grid.
Var window_partition_spatial(const Var& x, int p);
Var window_stitch_spatial(const Var& windows, int64_t height, int64_t width);
/// (N_t, H, W, P_t, C).
Var window_partition_temporal(const Var& x, int pt);
Var window_stitch_temporal(const Var& windows);

struct MsaParams {
  LinearLayer q, k, v, out;
};

/// Multi-head scaled dot-product self-attention over tokens (B, L, E).
Var msa(const Var& tokens, const MsaParams& p, int heads);

/// Row-stochastic attention weights (B * heads, L, L) of `msa`, for inspection.
Tensor msa_attention_map(const Tensor& tokens, const MsaParams& p, int heads);

struct FfnParams {
  LayerNormLayer norm;
  LinearLayer fc1, fc2;  // C -> 4C -> C
};

/// x + fc2(gelu(fc1(norm(x)))).
Var ffn_sublayer(const Var& x, const FfnParams& p);

struct EncoderParams {
  LayerNormLayer norm_s, norm_t;
  MsaParams msa_s, msa_t;
  FfnParams ffn;
};

/// Local encoder: windowed spatial MSA, windowed temporal MSA, FFN, each a
/// pre-norm residual sublayer. Output has the input shape.
Var stsa_local(const Var& x, const EncoderParams& p, const AttentionConfig& cfg);
/// Global encoder: spatial average pooling by S, then full spatial MSA,
/// full temporal MSA and FFN. Output is (H/S, W/S, T, C).
Var stsa_global(const Var& x, const EncoderParams& p, const AttentionConfig& cfg);

struct StcaParams {
  LayerNormLayer norm_q, norm_kv;
  LinearLayer q, k, v;    // first (spatial) stage
  LinearLayer k2, v2;     // second (temporal) stage, from stage-one output
};

/// Spatio-temporal cross attention. Stage one attends over HW tokens with
/// T*C embeddings, stage two over T tokens with HW*C embeddings using the
/// original queries. The query volume is added back as a residual.
Var stca(const Var& query, const Var& kv, const StcaParams& p, int heads = 1);

struct DecoderParams {
  StcaParams stca_local, stca_global;
  FfnParams ffn_local, ffn_global;
};

/// Returns (F_L*, F_G*) at the resolution of F_L.
std::pair<Var, Var> stca_decoder(const Var& local, const Var& global, const DecoderParams& p,
                                 const AttentionConfig& cfg);

struct BlockParams {
  LinearLayer fuse;  // 2C -> C; unused by the first block
  EncoderParams local, global;
  DecoderParams decoder;
};

EncoderParams make_encoder_params(ParameterSet& ps, Initializer& init, const std::string& prefix, int channels);
DecoderParams make_decoder_params(ParameterSet& ps, Initializer& init, const std::string& prefix, int channels);
/// Registers parameters under "<prefix>.<index>.*"; blocks after the first
/// also own the inter-block fusion projection.
BlockParams make_block_params(ParameterSet& ps, Initializer& init, const std::string& prefix, int index,
                              int channels);

/// One encoder/decoder block: (F_L*, F_G*).
std::pair<Var, Var> trt_block(const Var& shallow, const BlockParams& p, const AttentionConfig& cfg);

/// Stacked blocks; each block after the first consumes the projection of
/// the previous block's concatenated outputs.
std::pair<Var, Var> trt_stack(const Var& shallow, const std::vector<BlockParams>& blocks, const AttentionConfig& cfg);

}  // namespace trtkit
