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

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "trtkit/autograd.hpp"
#include "trtkit/conv.hpp"

namespace trtkit {

/// Named trainable tensors in insertion order.
class ParameterSet {
 public:
  /// Registers a leaf that requires gradients. Names must be unique.
  Var add(const std::string& name, Tensor init);
  Var get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<Var>& vars() const noexcept { return vars_; }
  size_t size() const noexcept { return vars_.size(); }
  int64_t element_count() const;

  void zero_grad();
  /// Rounds every value to the nearest float.
  void round_to_float();

 private:
  std::vector<std::string> names_;
  std::vector<Var> vars_;
  std::map<std::string, size_t> index_;
};

/// Deterministic weight initialiser.
class Initializer {
 public:
  explicit Initializer(uint64_t seed);
  /// Uniform in [-bound, bound].
  Tensor uniform(const Shape& shape, double bound);
  Tensor normal(const Shape& shape, double stddev);

 private:
  std::mt19937_64 rng_;
};

struct LinearLayer {
  Var weight;  // (in, out)
  Var bias;    // (out) or undefined
  Var operator()(const Var& x) const;
};

struct LayerNormLayer {
  Var gamma, beta;
  Var operator()(const Var& x) const;
};

struct Conv3dLayer {
  Var weight;  // (kh, kw, kt, cin, cout)
  Var bias;
  Conv3dSpec spec;
  Var operator()(const Var& x) const;
};

struct DepthwiseConv3dLayer {
  Var weight;  // (kh, kw, kt, c)
  Var bias;
  Conv3dSpec spec;
  Var operator()(const Var& x) const;
};

struct ConvTranspose3dLayer {
  Var weight;  // (kh, kw, kt, cin, cout)
  Var bias;
  Conv3dSpec spec;
  Var operator()(const Var& x) const;
};

// Factories registering "<name>.weight" and "<name>.bias". Weights and biases
// are uniform in +-1/sqrt(fan_in); `zero` initialises both to 0.
LinearLayer make_linear(ParameterSet& ps, Initializer& init, const std::string& name, int64_t in, int64_t out,
                        bool bias = true, bool zero = false);
LayerNormLayer make_layer_norm(ParameterSet& ps, const std::string& name, int64_t dim);
Conv3dLayer make_conv3d(ParameterSet& ps, Initializer& init, const std::string& name, std::array<int64_t, 3> kernel,
                        int64_t cin, int64_t cout, const Conv3dSpec& spec, bool zero = false);
DepthwiseConv3dLayer make_depthwise_conv3d(ParameterSet& ps, Initializer& init, const std::string& name,
                                           std::array<int64_t, 3> kernel, int64_t channels, const Conv3dSpec& spec);
ConvTranspose3dLayer make_conv_transpose3d(ParameterSet& ps, Initializer& init, const std::string& name,
                                           std::array<int64_t, 3> kernel, int64_t cin, int64_t cout,
                                           const Conv3dSpec& spec);

}  // namespace trtkit
