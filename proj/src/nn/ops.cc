// nn/ops.cc

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

#include "nn/ops.h"

#include <cmath>
#include <memory>

#include "base/error.h"

namespace aex::nn {

namespace {

void CheckSameShape(const Var &a, const Var &b, const char *op) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
              std::to_string(b.cols()));
}

Node &P(Node &n, size_t i) { return *n.parents[i]; }

float SigmoidScalar(float z) { return 1.0f / (1.0f + std::exp(-z)); }

}  // namespace

Var MatMul(const Var &a, const Var &b) {
  Require(a.cols() == b.rows(), ErrorCode::kShapeMismatch, "MatMul: inner dims differ");
  Mat out = a.value() * b.value();
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    Node &A = P(n, 0), &B = P(n, 1);
    if (A.requires_grad) A.AccumulateGradExpr(n.grad * B.value.transpose());
    if (B.requires_grad) B.AccumulateGradExpr(A.value.transpose() * n.grad);
  });
}

Var MatMulNT(const Var &a, const Var &b) {
  Require(a.cols() == b.cols(), ErrorCode::kShapeMismatch, "MatMulNT: inner dims differ");
  Mat out = a.value() * b.value().transpose();
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    Node &A = P(n, 0), &B = P(n, 1);
    if (A.requires_grad) A.AccumulateGradExpr(n.grad * B.value);
    if (B.requires_grad) B.AccumulateGradExpr(n.grad.transpose() * A.value);
  });
}

Var Add(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Add");
  return MakeResult(a.value() + b.value(), {a, b}, [](Node &n) {
    if (P(n, 0).requires_grad) P(n, 0).AccumulateGrad(n.grad);
    if (P(n, 1).requires_grad) P(n, 1).AccumulateGrad(n.grad);
  });
}

Var Sub(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Sub");
  return MakeResult(a.value() - b.value(), {a, b}, [](Node &n) {
    if (P(n, 0).requires_grad) P(n, 0).AccumulateGrad(n.grad);
    if (P(n, 1).requires_grad) P(n, 1).AccumulateGradExpr(-n.grad);
  });
}

Var Mul(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Mul");
  return MakeResult(a.value().cwiseProduct(b.value()), {a, b}, [](Node &n) {
    Node &A = P(n, 0), &B = P(n, 1);
    if (A.requires_grad) A.AccumulateGradExpr(n.grad.cwiseProduct(B.value));
    if (B.requires_grad) B.AccumulateGradExpr(n.grad.cwiseProduct(A.value));
  });
}

Var Scale(const Var &a, float s) {
  return MakeResult(a.value() * s, {a}, [s](Node &n) { P(n, 0).AccumulateGradExpr(n.grad * s); });
}

Var AddBias(const Var &x, const Var &bias) {
  Require(bias.rows() == 1 && bias.cols() == x.cols(), ErrorCode::kShapeMismatch,
          "AddBias: bias must be 1 x cols");
  Mat out = x.value().rowwise() + bias.value().row(0);
  return MakeResult(std::move(out), {x, bias}, [](Node &n) {
    if (P(n, 0).requires_grad) P(n, 0).AccumulateGrad(n.grad);
    if (P(n, 1).requires_grad) P(n, 1).AccumulateGradExpr(n.grad.colwise().sum());
  });
}

Var AddConstant(const Var &x, const Mat &c) {
  Require(c.rows() == x.rows() && c.cols() == x.cols(), ErrorCode::kShapeMismatch,
          "AddConstant: shape mismatch");
  return MakeResult(x.value() + c, {x}, [](Node &n) { P(n, 0).AccumulateGrad(n.grad); });
}

Var Sum(const std::vector<Var> &terms) {
  Require(!terms.empty(), ErrorCode::kShapeMismatch, "Sum of nothing");
  Mat out = terms[0].value();
  for (size_t i = 1; i < terms.size(); ++i) {
    CheckSameShape(terms[0], terms[i], "Sum");
    out += terms[i].value();
  }
  return MakeResult(std::move(out), terms, [](Node &n) {
    for (auto &p : n.parents)
      if (p->requires_grad) p->AccumulateGrad(n.grad);
  });
}

Var Relu(const Var &x) {
  return MakeResult(x.value().cwiseMax(0.0f), {x}, [](Node &n) {
    Node &X = P(n, 0);
    X.AccumulateGradExpr((X.value.array() > 0.0f).select(n.grad, 0.0f));
  });
}

Var Sigmoid(const Var &x) {
  Mat out = x.value().unaryExpr([](float z) { return SigmoidScalar(z); });
  return MakeResult(std::move(out), {x}, [](Node &n) {
    const auto &y = n.value.array();
    P(n, 0).AccumulateGradExpr((n.grad.array() * y * (1.0f - y)).matrix());
  });
}

Var Tanh(const Var &x) {
  Mat out = x.value().array().tanh().matrix();
  return MakeResult(std::move(out), {x}, [](Node &n) {
    const auto &y = n.value.array();
    P(n, 0).AccumulateGradExpr((n.grad.array() * (1.0f - y * y)).matrix());
  });
}

Var ConcatCols(const std::vector<Var> &parts) {
  Require(!parts.empty(), ErrorCode::kShapeMismatch, "ConcatCols of nothing");
  Index cols = 0;
  for (const auto &p : parts) {
    Require(p.rows() == parts[0].rows(), ErrorCode::kShapeMismatch,
            "ConcatCols: row counts differ");
    cols += p.cols();
  }
  Mat out(parts[0].rows(), cols);
  Index c = 0;
  for (const auto &p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return MakeResult(std::move(out), parts, [](Node &n) {
    Index c = 0;
    for (auto &p : n.parents) {
      const Index w = p->value.cols();
      if (p->requires_grad) p->AccumulateGradExpr(n.grad.middleCols(c, w));
      c += w;
    }
  });
}

Var ConcatRows(const std::vector<Var> &parts) {
  Require(!parts.empty(), ErrorCode::kShapeMismatch, "ConcatRows of nothing");
  Index rows = 0;
  for (const auto &p : parts) {
    Require(p.cols() == parts[0].cols(), ErrorCode::kShapeMismatch,
            "ConcatRows: column counts differ");
    rows += p.rows();
  }
  Mat out(rows, parts[0].cols());
  Index r = 0;
  for (const auto &p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return MakeResult(std::move(out), parts, [](Node &n) {
    Index r = 0;
    for (auto &p : n.parents) {
      const Index h = p->value.rows();
      if (p->requires_grad) p->AccumulateGradExpr(n.grad.middleRows(r, h));
      r += h;
    }
  });
}

Var SliceRows(const Var &x, Index start, Index count) {
  Require(start >= 0 && count >= 0 && start + count <= x.rows(), ErrorCode::kShapeMismatch,
          "SliceRows out of range");
  return MakeResult(x.value().middleRows(start, count), {x}, [start, count](Node &n) {
    Node &X = P(n, 0);
    if (X.grad.size() == 0) X.grad = Mat::Zero(X.value.rows(), X.value.cols());
    X.grad.middleRows(start, count) += n.grad;
  });
}

Var SliceCols(const Var &x, Index start, Index count) {
  Require(start >= 0 && count >= 0 && start + count <= x.cols(), ErrorCode::kShapeMismatch,
          "SliceCols out of range");
  return MakeResult(x.value().middleCols(start, count), {x}, [start, count](Node &n) {
    Node &X = P(n, 0);
    if (X.grad.size() == 0) X.grad = Mat::Zero(X.value.rows(), X.value.cols());
    X.grad.middleCols(start, count) += n.grad;
  });
}

Var Reshape(const Var &x, Index rows, Index cols) {
  Require(rows * cols == x.rows() * x.cols(), ErrorCode::kShapeMismatch,
          "Reshape must preserve the element count");
  Mat out = Eigen::Map<const Mat>(x.value().data(), rows, cols);
  return MakeResult(std::move(out), {x}, [](Node &n) {
    Node &X = P(n, 0);
    X.AccumulateGradExpr(Eigen::Map<const Mat>(n.grad.data(), X.value.rows(), X.value.cols()));
  });
}

Var GatherRows(const Var &x, std::vector<int> index) {
  Mat out(static_cast<Index>(index.size()), x.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    Require(index[i] < x.rows(), ErrorCode::kShapeMismatch, "GatherRows index out of range");
    if (index[i] < 0) {
      out.row(i).setZero();
    } else {
      out.row(i) = x.value().row(index[i]);
    }
  }
  auto idx = std::make_shared<std::vector<int>>(std::move(index));
  return MakeResult(std::move(out), {x}, [idx](Node &n) {
    Node &X = P(n, 0);
    if (X.grad.size() == 0) X.grad = Mat::Zero(X.value.rows(), X.value.cols());
    for (size_t i = 0; i < idx->size(); ++i)
      if ((*idx)[i] >= 0) X.grad.row((*idx)[i]) += n.grad.row(i);
  });
}

Var ScatterAddRows(const Var &x, std::vector<int> index, Index out_rows) {
  Require(static_cast<Index>(index.size()) == x.rows(), ErrorCode::kShapeMismatch,
          "ScatterAddRows: one index per input row");
  Mat out = Mat::Zero(out_rows, x.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    Require(index[i] < out_rows, ErrorCode::kShapeMismatch, "ScatterAddRows index out of range");
    if (index[i] >= 0) out.row(index[i]) += x.value().row(i);
  }
  auto idx = std::make_shared<std::vector<int>>(std::move(index));
  return MakeResult(std::move(out), {x}, [idx](Node &n) {
    Node &X = P(n, 0);
    Mat g(X.value.rows(), X.value.cols());
    for (size_t i = 0; i < idx->size(); ++i) {
      if ((*idx)[i] >= 0) {
        g.row(i) = n.grad.row((*idx)[i]);
      } else {
        g.row(i).setZero();
      }
    }
    X.AccumulateGrad(g);
  });
}

Var LayerNorm(const Var &x, const Var &gamma, const Var &beta, float eps) {
  Require(gamma.cols() == x.cols() && beta.cols() == x.cols(), ErrorCode::kShapeMismatch,
          "LayerNorm: parameter width differs from input");
  const Index rows = x.rows(), cols = x.cols();
  auto xhat = std::make_shared<Mat>(rows, cols);
  auto inv_std = std::make_shared<Eigen::VectorXf>(rows);
  for (Index r = 0; r < rows; ++r) {
    const auto row = x.value().row(r);
    const float mean = row.mean();
    const float var = (row.array() - mean).square().mean();
    (*inv_std)(r) = 1.0f / std::sqrt(var + eps);
    xhat->row(r) = (row.array() - mean) * (*inv_std)(r);
  }
  Mat out = (xhat->array().rowwise() * gamma.value().row(0).array()).rowwise() +
            beta.value().row(0).array();
  return MakeResult(std::move(out), {x, gamma, beta}, [xhat, inv_std](Node &n) {
    Node &X = P(n, 0), &G = P(n, 1), &B = P(n, 2);
    if (G.requires_grad) G.AccumulateGradExpr(n.grad.cwiseProduct(*xhat).colwise().sum());
    if (B.requires_grad) B.AccumulateGradExpr(n.grad.colwise().sum());
    if (X.requires_grad) {
      const Mat dxhat = n.grad.array().rowwise() * G.value.row(0).array();
      const float cols = static_cast<float>(dxhat.cols());
      Mat dx(dxhat.rows(), dxhat.cols());
      for (Index r = 0; r < dxhat.rows(); ++r) {
        const float m1 = dxhat.row(r).mean();
        const float m2 = dxhat.row(r).cwiseProduct(xhat->row(r)).sum() / cols;
        dx.row(r) = (dxhat.row(r).array() - m1 - xhat->row(r).array() * m2) * (*inv_std)(r);
      }
      X.AccumulateGrad(dx);
    }
  });
}

Var Attention(const Var &q, const Var &k, const Var &v, int heads, int groups,
              const Mat *bias, std::vector<Mat> *weights) {
  const Index d = q.cols();
  Require(k.cols() == d && v.cols() == d && d % heads == 0, ErrorCode::kShapeMismatch,
          "Attention: widths must match and divide by heads");
  Require(q.rows() % groups == 0 && k.rows() % groups == 0 && v.rows() == k.rows(),
          ErrorCode::kShapeMismatch, "Attention: rows must split evenly into groups");
  const Index lq = q.rows() / groups, lk = k.rows() / groups, dh = d / heads;
  if (bias)
    Require(bias->rows() == lq && bias->cols() == lk, ErrorCode::kShapeMismatch,
            "Attention: bias must be Lq x Lk");
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));

  auto probs = std::make_shared<std::vector<Mat>>(static_cast<size_t>(groups) * heads);
  Mat out(q.rows(), d);
  for (int g = 0; g < groups; ++g) {
    for (int h = 0; h < heads; ++h) {
      const auto qb = q.value().block(g * lq, h * dh, lq, dh);
      const auto kb = k.value().block(g * lk, h * dh, lk, dh);
      const auto vb = v.value().block(g * lk, h * dh, lk, dh);
      Mat s = (qb * kb.transpose()) * scale;
      if (bias) s += *bias;
      for (Index r = 0; r < lq; ++r) {
        const float mx = s.row(r).maxCoeff();
        s.row(r) = (s.row(r).array() - mx).exp();
        s.row(r) /= s.row(r).sum();
      }
      out.block(g * lq, h * dh, lq, dh).noalias() = s * vb;
      (*probs)[g * heads + h] = std::move(s);
    }
  }
  if (weights) *weights = *probs;
  return MakeResult(std::move(out), {q, k, v}, [probs, heads, groups, lq, lk, dh,
                                                scale](Node &n) {
    Node &Q = P(n, 0), &K = P(n, 1), &V = P(n, 2);
    Mat dq = Mat::Zero(Q.value.rows(), Q.value.cols());
    Mat dk = Mat::Zero(K.value.rows(), K.value.cols());
    Mat dv = Mat::Zero(V.value.rows(), V.value.cols());
    for (int g = 0; g < groups; ++g) {
      for (int h = 0; h < heads; ++h) {
        const Mat &pm = (*probs)[g * heads + h];
        const auto go = n.grad.block(g * lq, h * dh, lq, dh);
        const auto qb = Q.value.block(g * lq, h * dh, lq, dh);
        const auto kb = K.value.block(g * lk, h * dh, lk, dh);
        const auto vb = V.value.block(g * lk, h * dh, lk, dh);
        dv.block(g * lk, h * dh, lk, dh).noalias() += pm.transpose() * go;
        Mat dp = go * vb.transpose();
        const Eigen::VectorXf rowdot = dp.cwiseProduct(pm).rowwise().sum();
        Mat ds = pm.cwiseProduct((dp.colwise() - rowdot));
        ds *= scale;
        dq.block(g * lq, h * dh, lq, dh).noalias() += ds * kb;
        dk.block(g * lk, h * dh, lk, dh).noalias() += ds.transpose() * qb;
      }
    }
    if (Q.requires_grad) Q.AccumulateGrad(dq);
    if (K.requires_grad) K.AccumulateGrad(dk);
    if (V.requires_grad) V.AccumulateGrad(dv);
  });
}

Var Lstm(const Var &x, const Var &wx, const Var &wh, const Var &bias, int batch,
         bool reverse) {
  const Index hidden = wh.rows();
  Require(wx.rows() == x.cols() && wx.cols() == 4 * hidden && wh.cols() == 4 * hidden &&
              bias.rows() == 1 && bias.cols() == 4 * hidden,
          ErrorCode::kShapeMismatch, "Lstm: parameter shapes inconsistent");
  Require(batch > 0 && x.rows() % batch == 0, ErrorCode::kShapeMismatch,
          "Lstm: rows must be a multiple of batch");
  const Index steps = x.rows() / batch, B = batch, H = hidden;

  // gates holds post-activation i, f, g, o; cells the cell states.
  auto gates = std::make_shared<Mat>(x.value() * wx.value());
  gates->rowwise() += bias.value().row(0);
  auto cells = std::make_shared<Mat>(x.rows(), H);
  Mat out(x.rows(), H);
  Mat h_prev = Mat::Zero(B, H), c_prev = Mat::Zero(B, H);
  for (Index s = 0; s < steps; ++s) {
    const Index t = reverse ? steps - 1 - s : s;
    auto gt = gates->middleRows(t * B, B);
    gt.noalias() += h_prev * wh.value();
    auto a = gt.array();
    a.leftCols(2 * H) = 1.0f / (1.0f + (-a.leftCols(2 * H)).exp());
    a.middleCols(2 * H, H) = a.middleCols(2 * H, H).tanh();
    a.rightCols(H) = 1.0f / (1.0f + (-a.rightCols(H)).exp());
    c_prev = (a.middleCols(H, H) * c_prev.array() + a.leftCols(H) * a.middleCols(2 * H, H))
                 .matrix();
    cells->middleRows(t * B, B) = c_prev;
    h_prev = (a.rightCols(H) * c_prev.array().tanh()).matrix();
    out.middleRows(t * B, B) = h_prev;
  }
  return MakeResult(std::move(out), {x, wx, wh, bias}, [gates, cells, steps, B, H,
                                                        reverse](Node &n) {
    Node &X = P(n, 0), &WX = P(n, 1), &WH = P(n, 2), &BI = P(n, 3);
    const Mat &hs = n.value;
    Mat dpre(gates->rows(), 4 * H);
    Mat hprev_all = Mat::Zero(gates->rows(), H);
    Mat dh_next = Mat::Zero(B, H), dc_next = Mat::Zero(B, H);
    for (Index s = steps - 1; s >= 0; --s) {
      const Index t = reverse ? steps - 1 - s : s;
      const Index tp = reverse ? t + 1 : t - 1;  // previous step in processing order
      const bool has_prev = s > 0;
      const auto a = gates->middleRows(t * B, B).array();
      const auto i = a.leftCols(H), f = a.middleCols(H, H), g = a.middleCols(2 * H, H),
                 o = a.rightCols(H);
      const Eigen::ArrayXXf c = cells->middleRows(t * B, B).array();
      const Eigen::ArrayXXf tc = c.tanh();
      const Eigen::ArrayXXf cp = has_prev ? Eigen::ArrayXXf(cells->middleRows(tp * B, B).array())
                                          : Eigen::ArrayXXf::Zero(B, H);
      const Eigen::ArrayXXf dh = n.grad.middleRows(t * B, B).array() + dh_next.array();
      const Eigen::ArrayXXf dc = dh * o * (1.0f - tc * tc) + dc_next.array();
      auto d = dpre.middleRows(t * B, B).array();
      d.leftCols(H) = dc * g * i * (1.0f - i);
      d.middleCols(H, H) = dc * cp * f * (1.0f - f);
      d.middleCols(2 * H, H) = dc * i * (1.0f - g * g);
      d.rightCols(H) = dh * tc * o * (1.0f - o);
      dc_next = (dc * f).matrix();
      dh_next.noalias() = dpre.middleRows(t * B, B) * WH.value.transpose();
      if (has_prev) hprev_all.middleRows(t * B, B) = hs.middleRows(tp * B, B);
    }
    if (X.requires_grad) X.AccumulateGradExpr(dpre * WX.value.transpose());
    if (WX.requires_grad) WX.AccumulateGradExpr(X.value.transpose() * dpre);
    if (WH.requires_grad) WH.AccumulateGradExpr(hprev_all.transpose() * dpre);
    if (BI.requires_grad) BI.AccumulateGradExpr(dpre.colwise().sum());
  });
}

Var BceWithLogits(const Var &logits, const std::vector<float> &labels) {
  Require(logits.cols() == 1 && static_cast<size_t>(logits.rows()) == labels.size(),
          ErrorCode::kLabelLengthMismatch, "BCE: one label per logit row required");
  Require(!labels.empty(), ErrorCode::kLabelLengthMismatch, "BCE: no labels");
  const Index n = logits.rows();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double z = logits.value()(i, 0), y = labels[i];
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  Mat out(1, 1);
  out(0, 0) = static_cast<float>(total / n);
  auto lab = std::make_shared<std::vector<float>>(labels);
  return MakeResult(std::move(out), {logits}, [lab](Node &nd) {
    Node &L = P(nd, 0);
    const Index rows = L.value.rows();
    Mat g(rows, 1);
    const float scale = nd.grad(0, 0) / static_cast<float>(rows);
    for (Index i = 0; i < rows; ++i) g(i, 0) = (SigmoidScalar(L.value(i, 0)) - (*lab)[i]) * scale;
    L.AccumulateGrad(g);
  });
}

Var ExternalLoss(const std::vector<Var> &inputs, float value, std::vector<Mat> grads) {
  Require(inputs.size() == grads.size(), ErrorCode::kShapeMismatch,
          "ExternalLoss: one gradient per input");
  for (size_t i = 0; i < inputs.size(); ++i)
    Require(inputs[i].rows() == grads[i].rows() && inputs[i].cols() == grads[i].cols(),
            ErrorCode::kShapeMismatch, "ExternalLoss: gradient shape differs from input");
  Mat out(1, 1);
  out(0, 0) = value;
  auto g = std::make_shared<std::vector<Mat>>(std::move(grads));
  return MakeResult(std::move(out), inputs, [g](Node &n) {
    const float s = n.grad(0, 0);
    for (size_t i = 0; i < n.parents.size(); ++i)
      if (n.parents[i]->requires_grad) n.parents[i]->AccumulateGradExpr((*g)[i] * s);
  });
}

}  // namespace aex::nn
