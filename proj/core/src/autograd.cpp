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

#include "trtkit/autograd.hpp"

#include <unordered_set>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {
thread_local bool g_grad_enabled = true;
}

Tensor& detail::Node::grad_buffer() {
  if (grad.shape() != value.shape()) grad = Tensor(value.shape(), 0.0);
  return grad;
}

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<detail::Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Var make_op(Tensor value, std::vector<Var> inputs, std::function<void(detail::Node&)> backward) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  bool any = false;
  if (g_grad_enabled) {
    for (const Var& v : inputs) any = any || v.requires_grad();
  }
  if (any) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (const Var& v : inputs) node->inputs.push_back(v.shared());
    node->backward = std::move(backward);
  }
  return Var::from_node(std::move(node));
}

void backward(const Var& root) {
  if (!root.defined()) throw Error("backward on undefined Var");
  if (root.size() != 1) throw ShapeError("backward requires a scalar root, got " + shape_string(root.shape()));
  if (!root.requires_grad()) return;

  // Iterative post-order DFS; reverse gives a topological order.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, size_t>> stack;
  stack.emplace_back(root.node(), 0);
  seen.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backward && !n->grad.empty()) {
      n->backward(*n);
      n->grad = Tensor();  // interior gradients are not retained
    }
  }
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

}  // namespace trtkit
