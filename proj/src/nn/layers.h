// nn/layers.h

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

#ifndef AEX_NN_LAYERS_H_
#define AEX_NN_LAYERS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "base/random.h"
#include "nn/ops.h"

namespace aex::nn {

/// Owns every trainable tensor of a model under a hierarchical name.
class ParamStore {
 public:
  explicit ParamStore(uint64_t seed = 0) : rng_(seed) {}

  Var Create(const std::string &name, Mat init);
  Var Zeros(const std::string &name, Index rows, Index cols);
  Var Constant(const std::string &name, Index rows, Index cols, float value);
  /// Glorot-uniform initialisation.
  Var Xavier(const std::string &name, Index fan_in, Index fan_out);
  Var Uniform(const std::string &name, Index rows, Index cols, float bound);

  const std::vector<std::pair<std::string, Var>> &params() const { return params_; }
  Var Find(const std::string &name) const;
  size_t NumParameters() const;
  void ZeroGrad();

  /// Binary form: u64 count, then per tensor (u32 name length, name,
  /// u32 rows, u32 cols, float32 data). Load requires matching names/shapes.
  void Save(std::ostream &os) const;
  void Load(std::istream &is);
  /// Deep copy of the values (not the graph identity).
  std::vector<Mat> Snapshot() const;
  void Restore(const std::vector<Mat> &values);

 private:
  Rng rng_;
  std::vector<std::pair<std::string, Var>> params_;
};

class Linear {
 public:
  Linear() = default;
  Linear(ParamStore &store, const std::string &name, Index in, Index out, bool bias = true);
  Var operator()(const Var &x) const;
  Index in() const { return weight_.rows(); }
  Index out() const { return weight_.cols(); }
  const Var &weight() const { return weight_; }

 private:
  Var weight_;
  Var bias_;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParamStore &store, const std::string &name, Index dim);
  Var operator()(const Var &x) const { return LayerNorm(x, gamma_, beta_); }

 private:
  Var gamma_, beta_;
};

/// Temporal convolution over rows with "same" zero padding.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParamStore &store, const std::string &name, Index in, Index out, int kernel);
  Var operator()(const Var &x) const;

 private:
  int kernel_ = 1;
  Index in_ = 0;
  Linear proj_;
};

class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(ParamStore &store, const std::string &name, Index in, Index hidden);
  Var operator()(const Var &x, int batch, bool reverse) const;

 private:
  Var wx_, wh_, bias_;
};

/// Bidirectional LSTM; output width 2 * hidden.
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParamStore &store, const std::string &name, Index in, Index hidden);
  Var operator()(const Var &x, int batch) const;

 private:
  LstmLayer fwd_, bwd_;
};

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore &store, const std::string &name, Index dim, int heads);
  Var operator()(const Var &query, const Var &memory, int groups = 1,
                 const Mat *bias = nullptr, std::vector<Mat> *weights = nullptr) const;
  int heads() const { return heads_; }

 private:
  int heads_ = 1;
  Linear q_, k_, v_, o_;
};

/// Pre-norm transformer layer. With a memory sequence the attention is
/// cross-attention (queries from x, keys/values from memory).
class TransformerLayer {
 public:
  TransformerLayer() = default;
  TransformerLayer(ParamStore &store, const std::string &name, Index dim, int heads,
                   Index ff_dim, bool cross = false);
  Var operator()(const Var &x, int groups = 1) const;
  Var operator()(const Var &x, const Var &memory, const Mat *bias = nullptr,
                 std::vector<Mat> *weights = nullptr) const;

 private:
  Var FeedForward(const Var &x) const;

  bool cross_ = false;
  LayerNormLayer norm_attn_, norm_mem_, norm_ff_;
  MultiHeadAttention attn_;
  Linear ff1_, ff2_;
};

/// Sinusoidal encoding of absolute time (seconds), so streams sampled at
/// different rates share one coordinate system.
Mat TimeEncoding(const std::vector<double> &times_s, Index dim);
/// Times of frame centres for `frames` frames with the given hop/window.
std::vector<double> FrameTimes(Index frames, double hop_s, double offset_s);

class Adam {
 public:
  Adam(ParamStore &store, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8, double clip_norm = 5.0);
  /// Clips the global gradient norm, updates, then zeroes gradients.
  /// Returns the pre-clip gradient norm.
  double Step();
  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

 private:
  ParamStore &store_;
  double lr_, beta1_, beta2_, eps_, clip_norm_;
  int64_t t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace aex::nn

#endif  // AEX_NN_LAYERS_H_
