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

#include <functional>
#include <memory>
#include <vector>

#include "trtkit/tensor.hpp"

namespace trtkit {

namespace detail {

struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this->grad and accumulates into the gradients of `inputs`.
  std::function<void(Node&)> backward;

  /// Gradient buffer, zero-initialised on first use.
  Tensor& grad_buffer();
  Node& input(size_t i) { return *inputs[i]; }
};

}  // namespace detail

/// Handle to a value in the reverse-mode tape. Copies share the same node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Tensor& value() const { return node_->value; }
  /// Mutable access for optimizers updating leaves in place.
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  int64_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }

  /// Accumulated gradient; an empty tensor when nothing reached this node.
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() { return node_->grad_buffer(); }
  void zero_grad() { node_->grad = Tensor(); }

  detail::Node* node() const noexcept { return node_.get(); }
  const std::shared_ptr<detail::Node>& shared() const noexcept { return node_; }

  static Var from_node(std::shared_ptr<detail::Node> n) {
    Var v;
    v.node_ = std::move(n);
    return v;
  }

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Record an operation result. When no input requires a gradient (or
/// recording is disabled) the backward closure is dropped.
Var make_op(Tensor value, std::vector<Var> inputs, std::function<void(detail::Node&)> backward);

/// Reverse sweep from a scalar root; gradients accumulate into leaves.
void backward(const Var& root);

bool grad_enabled();

/// Disables tape recording for the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace trtkit
