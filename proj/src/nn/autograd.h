// nn/autograd.h

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

#ifndef AEX_NN_AUTOGRAD_H_
#define AEX_NN_AUTOGRAD_H_

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace aex::nn {

/// Rows are time steps (frames), columns are channels.
using Mat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<float, 1, Eigen::Dynamic>;

struct Node {
  Mat value;
  Mat grad;  // empty until something flows back
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backward;

  void AccumulateGrad(const Mat &g);
  template <typename Expr>
  void AccumulateGradExpr(const Expr &g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

/// Handle to a value in the computation graph. Cheap to copy.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Mat &value() const { return node_->value; }
  Mat &mutable_value() { return node_->value; }
  const Mat &grad() const { return node_->grad; }
  Mat &mutable_grad() { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  bool defined() const { return node_ != nullptr; }
  const std::shared_ptr<Node> &node() const { return node_; }

  void ZeroGrad() { node_->grad.resize(0, 0); }

 private:
  std::shared_ptr<Node> node_;
};

Var Constant(Mat value);
/// Leaf that accumulates gradients (a trainable parameter).
Var Leaf(Mat value);

/// Whether new ops record their backward closure. Off inside NoGradGuard.
bool GradEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};

/// Creates the result node of an op. `backward` receives the result node
/// (whose grad is populated) and must push gradients into its parents.
Var MakeResult(Mat value, std::vector<Var> parents, std::function<void(Node &)> backward);

/// Reverse sweep from a scalar (1x1) output with seed gradient 1.
void Backward(const Var &root);
/// Reverse sweep seeded with an explicit gradient of the same shape.
void Backward(const Var &root, const Mat &seed);

}  // namespace aex::nn

#endif  // AEX_NN_AUTOGRAD_H_
