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

#include "trtkit/params.hpp"

#include <cmath>

#include "trtkit/error.hpp"
#include "trtkit/ops.hpp"
#include "trtkit/rng.hpp"

namespace trtkit {

Var ParameterSet::add(const std::string& name, Tensor init) {
  if (contains(name)) throw ConfigError("duplicate parameter " + name);
  Var v(std::move(init), true);
  index_[name] = vars_.size();
  names_.push_back(name);
  vars_.push_back(v);
  return v;
}

Var ParameterSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter " + name);
  return vars_[it->second];
}

int64_t ParameterSet::element_count() const {
  int64_t n = 0;
  for (const Var& v : vars_) n += v.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (Var& v : vars_) v.zero_grad();
}

void ParameterSet::round_to_float() {
  for (Var& v : vars_) {
    Tensor& t = v.mutable_value();
    for (int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(static_cast<float>(t[i]));
  }
}

Initializer::Initializer(uint64_t seed) : rng_(stream_key(seed, 0x1417)) {}

Tensor Initializer::uniform(const Shape& shape, double bound) {
  std::uniform_real_distribution<double> d(-bound, bound);
  Tensor t(shape);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = d(rng_);
  return t;
}

Tensor Initializer::normal(const Shape& shape, double stddev) {
  std::normal_distribution<double> d(0.0, stddev);
  Tensor t(shape);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = d(rng_);
  return t;
}

Var LinearLayer::operator()(const Var& x) const { return linear(x, weight, bias); }

Var LayerNormLayer::operator()(const Var& x) const { return layer_norm_last(x, gamma, beta); }

Var Conv3dLayer::operator()(const Var& x) const { return conv3d(x, weight, bias, spec); }

Var DepthwiseConv3dLayer::operator()(const Var& x) const { return depthwise_conv3d(x, weight, bias, spec); }

Var ConvTranspose3dLayer::operator()(const Var& x) const { return conv_transpose3d(x, weight, bias, spec); }

namespace {

Tensor init_tensor(Initializer& init, const Shape& shape, double fan_in, bool zero) {
  return zero ? Tensor(shape, 0.0) : init.uniform(shape, 1.0 / std::sqrt(fan_in));
}

}  // namespace

LinearLayer make_linear(ParameterSet& ps, Initializer& init, const std::string& name, int64_t in, int64_t out,
                        bool bias, bool zero) {
  LinearLayer l;
  l.weight = ps.add(name + ".weight", init_tensor(init, {in, out}, static_cast<double>(in), zero));
  if (bias) l.bias = ps.add(name + ".bias", init_tensor(init, {out}, static_cast<double>(in), zero));
  return l;
}

LayerNormLayer make_layer_norm(ParameterSet& ps, const std::string& name, int64_t dim) {
  return {ps.add(name + ".gamma", Tensor({dim}, 1.0)), ps.add(name + ".beta", Tensor({dim}, 0.0))};
}

Conv3dLayer make_conv3d(ParameterSet& ps, Initializer& init, const std::string& name, std::array<int64_t, 3> k,
                        int64_t cin, int64_t cout, const Conv3dSpec& spec, bool zero) {
  const double fan_in = static_cast<double>(k[0] * k[1] * k[2] * cin);
  Conv3dLayer c;
  c.weight = ps.add(name + ".weight", init_tensor(init, {k[0], k[1], k[2], cin, cout}, fan_in, zero));
  c.bias = ps.add(name + ".bias", init_tensor(init, {cout}, fan_in, zero));
  c.spec = spec;
  return c;
}

DepthwiseConv3dLayer make_depthwise_conv3d(ParameterSet& ps, Initializer& init, const std::string& name,
                                           std::array<int64_t, 3> k, int64_t channels, const Conv3dSpec& spec) {
  const double fan_in = static_cast<double>(k[0] * k[1] * k[2]);
  DepthwiseConv3dLayer c;
  c.weight = ps.add(name + ".weight", init_tensor(init, {k[0], k[1], k[2], channels}, fan_in, false));
  c.bias = ps.add(name + ".bias", init_tensor(init, {channels}, fan_in, false));
  c.spec = spec;
  return c;
}

ConvTranspose3dLayer make_conv_transpose3d(ParameterSet& ps, Initializer& init, const std::string& name,
                                           std::array<int64_t, 3> k, int64_t cin, int64_t cout,
                                           const Conv3dSpec& spec) {
  const double fan_in = static_cast<double>(k[0] * k[1] * k[2] * cin);
  ConvTranspose3dLayer c;
  c.weight = ps.add(name + ".weight", init_tensor(init, {k[0], k[1], k[2], cin, cout}, fan_in, false));
  c.bias = ps.add(name + ".bias", init_tensor(init, {cout}, fan_in, false));
  c.spec = spec;
  return c;
}

}  // namespace trtkit
