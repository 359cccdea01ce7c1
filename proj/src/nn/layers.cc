// nn/layers.cc

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

#include "nn/layers.h"

#include <cmath>
#include <istream>
#include <ostream>

#include "base/error.h"

namespace aex::nn {

Var ParamStore::Create(const std::string &name, Mat init) {
  for (const auto &p : params_)
    Require(p.first != name, ErrorCode::kShapeMismatch, "duplicate parameter " + name);
  Var v = Leaf(std::move(init));
  params_.emplace_back(name, v);
  return v;
}

Var ParamStore::Zeros(const std::string &name, Index rows, Index cols) {
  return Create(name, Mat::Zero(rows, cols));
}

Var ParamStore::Constant(const std::string &name, Index rows, Index cols, float value) {
  return Create(name, Mat::Constant(rows, cols, value));
}

Var ParamStore::Uniform(const std::string &name, Index rows, Index cols, float bound) {
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<float>(rng_.Uniform(-bound, bound));
  return Create(name, std::move(m));
}

Var ParamStore::Xavier(const std::string &name, Index fan_in, Index fan_out) {
  const float bound = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
  return Uniform(name, fan_in, fan_out, bound);
}

Var ParamStore::Find(const std::string &name) const {
  for (const auto &p : params_)
    if (p.first == name) return p.second;
  Fail(ErrorCode::kShapeMismatch, "no parameter named " + name);
}

size_t ParamStore::NumParameters() const {
  size_t n = 0;
  for (const auto &p : params_) n += static_cast<size_t>(p.second.value().size());
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto &p : params_) p.second.ZeroGrad();
}

namespace {
template <typename T>
void Put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T>
T Get(std::istream &is) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!is) Fail(ErrorCode::kFormat, "truncated parameter blob");
  return v;
}
}  // namespace

void ParamStore::Save(std::ostream &os) const {
  Put<uint64_t>(os, params_.size());
  for (const auto &[name, v] : params_) {
    Put<uint32_t>(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    Put<uint32_t>(os, static_cast<uint32_t>(v.rows()));
    Put<uint32_t>(os, static_cast<uint32_t>(v.cols()));
    os.write(reinterpret_cast<const char *>(v.value().data()),
             static_cast<std::streamsize>(v.value().size() * sizeof(float)));
  }
}

void ParamStore::Load(std::istream &is) {
  const uint64_t count = Get<uint64_t>(is);
  Require(count == params_.size(), ErrorCode::kFormat,
          "checkpoint has " + std::to_string(count) + " tensors, model has " +
              std::to_string(params_.size()));
  for (auto &[name, v] : params_) {
    const uint32_t len = Get<uint32_t>(is);
    std::string stored(len, '\0');
    is.read(stored.data(), len);
    const uint32_t rows = Get<uint32_t>(is), cols = Get<uint32_t>(is);
    Require(stored == name && rows == v.rows() && cols == v.cols(), ErrorCode::kFormat,
            "checkpoint tensor " + stored + " does not match model tensor " + name);
    is.read(reinterpret_cast<char *>(v.mutable_value().data()),
            static_cast<std::streamsize>(v.value().size() * sizeof(float)));
    if (!is) Fail(ErrorCode::kFormat, "truncated tensor " + name);
  }
}

std::vector<Mat> ParamStore::Snapshot() const {
  std::vector<Mat> out;
  out.reserve(params_.size());
  for (const auto &p : params_) out.push_back(p.second.value());
  return out;
}

void ParamStore::Restore(const std::vector<Mat> &values) {
  Require(values.size() == params_.size(), ErrorCode::kShapeMismatch, "snapshot size");
  for (size_t i = 0; i < values.size(); ++i) params_[i].second.mutable_value() = values[i];
}

Linear::Linear(ParamStore &store, const std::string &name, Index in, Index out, bool bias) {
  weight_ = store.Xavier(name + ".weight", in, out);
  if (bias) bias_ = store.Zeros(name + ".bias", 1, out);
}

Var Linear::operator()(const Var &x) const {
  Var y = MatMul(x, weight_);
  return bias_.defined() ? AddBias(y, bias_) : y;
}

LayerNormLayer::LayerNormLayer(ParamStore &store, const std::string &name, Index dim) {
  gamma_ = store.Constant(name + ".gamma", 1, dim, 1.0f);
  beta_ = store.Zeros(name + ".beta", 1, dim);
}

Conv1d::Conv1d(ParamStore &store, const std::string &name, Index in, Index out, int kernel)
    : kernel_(kernel), in_(in), proj_(store, name, in * kernel, out) {
  Require(kernel % 2 == 1, ErrorCode::kShapeMismatch, "Conv1d kernel must be odd");
}

Var Conv1d::operator()(const Var &x) const {
  Require(x.cols() == in_, ErrorCode::kShapeMismatch, "Conv1d input width");
  const int rows = static_cast<int>(x.rows()), half = kernel_ / 2;
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(rows) * kernel_);
  for (int t = 0; t < rows; ++t)
    for (int j = -half; j <= half; ++j) idx.push_back(t + j >= 0 && t + j < rows ? t + j : -1);
  return proj_(Reshape(GatherRows(x, std::move(idx)), rows, in_ * kernel_));
}

LstmLayer::LstmLayer(ParamStore &store, const std::string &name, Index in, Index hidden) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(hidden));
  wx_ = store.Uniform(name + ".wx", in, 4 * hidden, bound);
  wh_ = store.Uniform(name + ".wh", hidden, 4 * hidden, bound);
  Mat b = Mat::Zero(1, 4 * hidden);
  b.middleCols(hidden, hidden).setOnes();  // forget gate
  bias_ = store.Create(name + ".bias", std::move(b));
}

Var LstmLayer::operator()(const Var &x, int batch, bool reverse) const {
  return nn::Lstm(x, wx_, wh_, bias_, batch, reverse);
}

BiLstm::BiLstm(ParamStore &store, const std::string &name, Index in, Index hidden)
    : fwd_(store, name + ".fwd", in, hidden), bwd_(store, name + ".bwd", in, hidden) {}

Var BiLstm::operator()(const Var &x, int batch) const {
  return ConcatCols({fwd_(x, batch, false), bwd_(x, batch, true)});
}

MultiHeadAttention::MultiHeadAttention(ParamStore &store, const std::string &name, Index dim,
                                       int heads)
    : heads_(heads),
      q_(store, name + ".q", dim, dim),
      k_(store, name + ".k", dim, dim),
      v_(store, name + ".v", dim, dim),
      o_(store, name + ".o", dim, dim) {
  Require(dim % heads == 0, ErrorCode::kShapeMismatch, "attention width must divide by heads");
}

Var MultiHeadAttention::operator()(const Var &query, const Var &memory, int groups,
                                   const Mat *bias, std::vector<Mat> *weights) const {
  return o_(Attention(q_(query), k_(memory), v_(memory), heads_, groups, bias, weights));
}

TransformerLayer::TransformerLayer(ParamStore &store, const std::string &name, Index dim,
                                   int heads, Index ff_dim, bool cross)
    : cross_(cross),
      norm_attn_(store, name + ".norm_attn", dim),
      norm_ff_(store, name + ".norm_ff", dim),
      attn_(store, name + ".attn", dim, heads),
      ff1_(store, name + ".ff1", dim, ff_dim),
      ff2_(store, name + ".ff2", ff_dim, dim) {
  if (cross_) norm_mem_ = LayerNormLayer(store, name + ".norm_mem", dim);
}

Var TransformerLayer::FeedForward(const Var &x) const {
  return Add(x, ff2_(Relu(ff1_(norm_ff_(x)))));
}

Var TransformerLayer::operator()(const Var &x, int groups) const {
  Require(!cross_, ErrorCode::kShapeMismatch, "cross-attention layer needs a memory");
  const Var n = norm_attn_(x);
  return FeedForward(Add(x, attn_(n, n, groups)));
}

Var TransformerLayer::operator()(const Var &x, const Var &memory, const Mat *bias,
                                 std::vector<Mat> *weights) const {
  Require(cross_, ErrorCode::kShapeMismatch, "self-attention layer given a memory");
  return FeedForward(Add(x, attn_(norm_attn_(x), norm_mem_(memory), 1, bias, weights)));
}

Mat TimeEncoding(const std::vector<double> &times_s, Index dim) {
  Mat out(static_cast<Index>(times_s.size()), dim);
  const Index pairs = dim / 2;
  constexpr double kMinPeriod = 0.02, kMaxPeriod = 20.0;
  for (Index p = 0; p < pairs; ++p) {
    const double period =
        kMinPeriod * std::pow(kMaxPeriod / kMinPeriod,
                              pairs > 1 ? static_cast<double>(p) / (pairs - 1) : 0.0);
    const double w = 2.0 * M_PI / period;
    for (size_t t = 0; t < times_s.size(); ++t) {
      out(static_cast<Index>(t), 2 * p) = static_cast<float>(std::sin(w * times_s[t]));
      out(static_cast<Index>(t), 2 * p + 1) = static_cast<float>(std::cos(w * times_s[t]));
    }
  }
  if (dim % 2) out.col(dim - 1).setZero();
  return out;
}

std::vector<double> FrameTimes(Index frames, double hop_s, double offset_s) {
  std::vector<double> t(static_cast<size_t>(frames));
  for (Index i = 0; i < frames; ++i) t[i] = offset_s + i * hop_s;
  return t;
}

Adam::Adam(ParamStore &store, double lr, double beta1, double beta2, double eps,
           double clip_norm)
    : store_(store), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), clip_norm_(clip_norm) {
  for (const auto &p : store_.params()) {
    m_.push_back(Mat::Zero(p.second.rows(), p.second.cols()));
    v_.push_back(Mat::Zero(p.second.rows(), p.second.cols()));
  }
}

double Adam::Step() {
  auto &params = store_.params();
  double sq = 0.0;
  for (const auto &p : params)
    if (p.second.grad().size()) sq += p.second.grad().cast<double>().squaredNorm();
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) Fail(ErrorCode::kDivergedLoss, "non-finite gradient norm");
  const double clip = (clip_norm_ > 0.0 && norm > clip_norm_) ? clip_norm_ / norm : 1.0;
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const float step = static_cast<float>(lr_ * std::sqrt(bc2) / bc1);
  for (size_t i = 0; i < params.size(); ++i) {
    Var v = params[i].second;
    if (v.grad().size() == 0) continue;
    const Mat g = v.grad() * static_cast<float>(clip);
    m_[i] = static_cast<float>(beta1_) * m_[i] + static_cast<float>(1.0 - beta1_) * g;
    v_[i] = static_cast<float>(beta2_) * v_[i] +
            static_cast<float>(1.0 - beta2_) * g.cwiseProduct(g);
    v.mutable_value().array() -=
        step * m_[i].array() / (v_[i].array().sqrt() + static_cast<float>(eps_));
  }
  store_.ZeroGrad();
  return norm;
}

}  // namespace aex::nn
