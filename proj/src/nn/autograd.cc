// nn/autograd.cc

// Copyright 2026  ActiveExtract Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "nn/autograd.h"

#include <unordered_set>

#include "base/error.h"

namespace aex::nn {

namespace {
thread_local bool g_grad_enabled = true;
}

void Node::AccumulateGrad(const Mat &g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var Constant(Mat value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return Var(n);
}

Var Leaf(Mat value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Var(n);
}

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Var MakeResult(Mat value, std::vector<Var> parents, std::function<void(Node &)> backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  if (g_grad_enabled) {
    for (const auto &p : parents) {
      if (p.requires_grad()) {
        n->requires_grad = true;
        break;
      }
    }
  }
  if (n->requires_grad) {
    n->parents.reserve(parents.size());
    for (auto &p : parents) n->parents.push_back(p.node());
    n->backward = std::move(backward);
  }
  return Var(n);
}

void Backward(const Var &root) {
  Require(root.rows() == 1 && root.cols() == 1, ErrorCode::kShapeMismatch,
          "Backward() without a seed needs a scalar output");
  Mat seed(1, 1);
  seed(0, 0) = 1.0f;
  Backward(root, seed);
}

void Backward(const Var &root, const Mat &seed) {
  if (!root.requires_grad()) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> visited;
  std::vector<std::pair<Node *, size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root.node()->AccumulateGrad(seed);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
    // Interior gradients are no longer needed once propagated.
    if (n->backward) n->grad.resize(0, 0);
  }
}

}  // namespace aex::nn
