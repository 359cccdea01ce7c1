// nn/ops.h

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

#ifndef AEX_NN_OPS_H_
#define AEX_NN_OPS_H_

#include <vector>

#include "nn/autograd.h"

namespace aex::nn {

using Index = Eigen::Index;

Var MatMul(const Var &a, const Var &b);    // a * b
Var MatMulNT(const Var &a, const Var &b);  // a * b^T
Var Add(const Var &a, const Var &b);
Var Sub(const Var &a, const Var &b);
Var Mul(const Var &a, const Var &b);  // elementwise
Var Scale(const Var &a, float s);
/// x + bias, bias a 1 x cols row broadcast over rows.
Var AddBias(const Var &x, const Var &bias);
/// x + c for a constant c of the same shape (no gradient to c).
Var AddConstant(const Var &x, const Mat &c);
Var Sum(const std::vector<Var> &terms);

Var Relu(const Var &x);
Var Sigmoid(const Var &x);
Var Tanh(const Var &x);

Var ConcatCols(const std::vector<Var> &parts);
Var ConcatRows(const std::vector<Var> &parts);
Var SliceRows(const Var &x, Index start, Index count);
Var SliceCols(const Var &x, Index start, Index count);
/// Row-major reinterpretation; rows * cols must be preserved.
Var Reshape(const Var &x, Index rows, Index cols);

/// out.row(i) = x.row(index[i]); index -1 yields a zero row.
Var GatherRows(const Var &x, std::vector<int> index);
/// out.row(index[i]) += x.row(i) over `out_rows` rows; index -1 is dropped.
Var ScatterAddRows(const Var &x, std::vector<int> index, Index out_rows);

/// Per-row normalisation over columns with learned gain and shift (1 x cols).
Var LayerNorm(const Var &x, const Var &gamma, const Var &beta, float eps = 1e-5f);

/// Scaled dot-product attention with `heads` heads and `groups` independent
/// blocks: q is (groups*Lq) x D, k and v are (groups*Lk) x D, group g owning
/// contiguous rows. `bias` (Lq x Lk), when given, is added to every logit
/// block. If `weights` is non-null it receives the softmax matrices in
/// (group, head) order.
Var Attention(const Var &q, const Var &k, const Var &v, int heads, int groups = 1,
              const Mat *bias = nullptr, std::vector<Mat> *weights = nullptr);

/// Single-layer LSTM over `batch` interleaved sequences: x is (T*batch) x In
/// with row t*batch + b. Gate order in the 4H columns: input, forget, cell,
/// output. Returns (T*batch) x H hidden states in the same layout.
Var Lstm(const Var &x, const Var &wx, const Var &wh, const Var &bias, int batch,
         bool reverse);

/// Mean binary cross-entropy of sigmoid(logits) (n x 1) against 0/1 labels.
Var BceWithLogits(const Var &logits, const std::vector<float> &labels);

/// Attaches an externally computed scalar loss: the result's value is
/// `value` and its backward adds grads[i] (scaled by the incoming gradient)
/// into inputs[i].
Var ExternalLoss(const std::vector<Var> &inputs, float value, std::vector<Mat> grads);

}  // namespace aex::nn

#endif  // AEX_NN_OPS_H_
