// tests/unit/nn_test.cc

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

#include <sstream>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "base/random.h"
#include "nn/layers.h"
#include "nn/ops.h"

using namespace aex;
using namespace aex::nn;

namespace {

Mat RandomMat(Rng &rng, Index r, Index c, double sd = 1.0) {
  Mat m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.Normal(0.0, sd));
  return m;
}

// Projects the op output on a fixed random direction and compares the
// analytic input gradients with central differences.
double MaxGradError(const std::function<Var(const std::vector<Var> &)> &op,
                    const std::vector<Mat> &inputs, uint64_t seed = 3, float h = 1e-2f) {
  Rng rng(seed);
  std::vector<Var> leaves;
  for (const auto &m : inputs) leaves.push_back(Leaf(m));
  Var out = op(leaves);
  const Mat dir = RandomMat(rng, out.rows(), out.cols());
  Backward(out, dir);
  double worst = 0.0;
  for (size_t k = 0; k < inputs.size(); ++k) {
    const Mat analytic = leaves[k].grad().size() ? leaves[k].grad()
                                                 : Mat::Zero(inputs[k].rows(), inputs[k].cols());
    for (Index i = 0; i < inputs[k].size(); ++i) {
      auto eval = [&](float delta) {
        std::vector<Var> in;
        for (size_t j = 0; j < inputs.size(); ++j) {
          Mat m = inputs[j];
          if (j == k) m.data()[i] += delta;
          in.push_back(Constant(m));
        }
        return static_cast<double>(op(in).value().cwiseProduct(dir).sum());
      };
      const double numeric = (eval(h) - eval(-h)) / (2.0 * h);
      const double a = analytic.data()[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-1}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("elementwise and matrix ops match finite differences") {
  Rng rng(1);
  const Mat a = RandomMat(rng, 4, 3), b = RandomMat(rng, 3, 5), c = RandomMat(rng, 4, 3);
  CHECK(MaxGradError([](const auto &v) { return MatMul(v[0], v[1]); }, {a, b}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return MatMulNT(v[0], v[1]); }, {a, c}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return Mul(Sub(v[0], v[1]), Add(v[0], v[1])); },
                     {a, c}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return Sigmoid(v[0]); }, {a}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return Tanh(Scale(v[0], 0.7f)); }, {a}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return AddBias(v[0], v[1]); },
                     {a, RandomMat(rng, 1, 3)}) < 2e-2);
}

TEST_CASE("shape ops route gradients to the right rows and columns") {
  Rng rng(2);
  const Mat a = RandomMat(rng, 6, 4), b = RandomMat(rng, 6, 2);
  CHECK(MaxGradError([](const auto &v) { return ConcatCols({v[0], v[1]}); }, {a, b}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return SliceCols(SliceRows(v[0], 1, 4), 1, 2); },
                     {a}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return GatherRows(v[0], {5, 0, -1, 0, 3}); }, {a}) <
        2e-2);
  CHECK(MaxGradError([](const auto &v) { return ScatterAddRows(v[0], {0, 2, 2, -1, 1, 0}, 3); },
                     {a}) < 2e-2);
  CHECK(MaxGradError([](const auto &v) { return Reshape(v[0], 3, 8); }, {a}) < 2e-2);
}

TEST_CASE("layer norm, attention and LSTM gradients") {
  Rng rng(4);
  const Mat x = RandomMat(rng, 5, 8);
  CHECK(MaxGradError([](const auto &v) { return LayerNorm(v[0], v[1], v[2]); },
                     {x, RandomMat(rng, 1, 8), RandomMat(rng, 1, 8)}) < 3e-2);

  const Mat q = RandomMat(rng, 6, 4), k = RandomMat(rng, 8, 4), val = RandomMat(rng, 8, 4);
  Mat bias = RandomMat(rng, 3, 4);
  CHECK(MaxGradError([&](const auto &v) { return Attention(v[0], v[1], v[2], 2, 2, &bias); },
                     {q, k, val}) < 3e-2);

  const Mat seq = RandomMat(rng, 4 * 3, 3, 0.5);
  const Mat wx = RandomMat(rng, 3, 8, 0.5), wh = RandomMat(rng, 2, 8, 0.5),
            b = RandomMat(rng, 1, 8, 0.5);
  for (bool reverse : {false, true}) {
    CHECK(MaxGradError([reverse](const auto &v) { return Lstm(v[0], v[1], v[2], v[3], 3, reverse); },
                       {seq, wx, wh, b}) < 3e-2);
  }
}

TEST_CASE("attention rows are probability distributions") {
  Rng rng(5);
  std::vector<Mat> weights;
  Attention(Constant(RandomMat(rng, 10, 8)), Constant(RandomMat(rng, 7, 8)),
            Constant(RandomMat(rng, 7, 8)), 4, 1, nullptr, &weights);
  REQUIRE(weights.size() == 4);
  for (const auto &w : weights) {
    CHECK(w.rows() == 10);
    CHECK(w.cols() == 7);
    for (Index r = 0; r < w.rows(); ++r) CHECK(w.row(r).sum() == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("BCE at maximum uncertainty is ln 2") {
  Var logits = Leaf(Mat::Zero(10, 1));
  Var loss = BceWithLogits(logits, std::vector<float>(10, 1.0f));
  CHECK(loss.value()(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  Backward(loss);
  CHECK(logits.grad()(0, 0) == doctest::Approx(-0.05).epsilon(1e-5));
  CHECK(BceWithLogits(Constant(Mat::Constant(4, 1, 30.0f)), std::vector<float>(4, 1.0f))
            .value()(0, 0) < 1e-9);
}

TEST_CASE("Adam minimises a quadratic") {
  ParamStore store(9);
  Var w = store.Create("w", Mat::Constant(1, 3, 2.0f));
  Adam opt(store, 0.05, 0.9, 0.999, 1e-8, 0.0);
  for (int i = 0; i < 400; ++i) {
    Var loss = MatMulNT(w, w);
    Backward(loss);
    opt.Step();
  }
  CHECK(w.value().norm() < 0.05);
}

TEST_CASE("no-grad mode records no graph") {
  Var w = Leaf(Mat::Ones(2, 2));
  NoGradGuard guard;
  Var y = MatMul(w, w);
  CHECK_FALSE(y.requires_grad());
  CHECK(y.node()->parents.empty());
}

TEST_CASE("parameter store save/load round trip") {
  ParamStore a(1), b(2);
  Linear la(a, "l", 3, 4), lb(b, "l", 3, 4);
  std::stringstream ss;
  a.Save(ss);
  b.Load(ss);
  CHECK(a.params()[0].second.value() == b.params()[0].second.value());
  ParamStore c(3);
  Linear lc(c, "other", 3, 4);
  std::stringstream ss2;
  a.Save(ss2);
  CHECK_THROWS(c.Load(ss2));
}
