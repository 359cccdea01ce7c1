// separator/separator.cc

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

#include "separator/separator.h"

#include <cmath>

#include "base/error.h"
#include "mixer/visual.h"
#include "nn/ops.h"

namespace aex {

using nn::Mat;
using nn::Var;
using Eigen::Index;

void EncoderConfig::Validate() const {
  Require(kernel_L >= 2 && kernel_L % 2 == 0, ErrorCode::kConfig,
          "encoder kernel_L must be even and at least 2");
  Require(channels_N > 0, ErrorCode::kConfig, "encoder channels_N must be positive");
}

void DprnnConfig::Validate() const {
  Require(feature_B > 0 && chunk_K >= 2 && repeats_R > 0 && hidden > 0, ErrorCode::kConfig,
          "dprnn sizes must be positive, chunk_K at least 2");
}

void XModalConfig::Validate() const {
  Require(chunk_C >= 2 && n_intra >= 0 && n_inter >= 0 && width_N > 0 && ff_dim > 0,
          ErrorCode::kConfig, "xmodal sizes must be positive, chunk_C at least 2");
  Require(heads > 0 && width_N % heads == 0, ErrorCode::kConfig,
          "xmodal width_N must divide by heads");
  Require(locality_s >= 0.0, ErrorCode::kConfig, "xmodal locality_s must be non-negative");
}

Index EncoderFrames(size_t num_samples, const EncoderConfig &cfg) {
  const auto n = static_cast<Index>(num_samples);
  Require(n >= cfg.kernel_L, ErrorCode::kTooShort,
          "audio_encode: " + std::to_string(n) + " samples is shorter than one kernel");
  return (n - cfg.kernel_L + cfg.stride() - 1) / cfg.stride() + 1;
}

AudioEncoder::AudioEncoder(nn::ParamStore &store, const std::string &name,
                           const EncoderConfig &cfg)
    : cfg_(cfg), proj_(store, name, cfg.kernel_L, cfg.channels_N, false) {
  cfg_.Validate();
}

Var AudioEncoder::operator()(const Waveform &y) const {
  const Index frames = EncoderFrames(y.size(), cfg_);
  const int stride = cfg_.stride();
  Mat patches = Mat::Zero(frames, cfg_.kernel_L);
  for (Index f = 0; f < frames; ++f)
    for (int j = 0; j < cfg_.kernel_L; ++j) {
      const size_t s = static_cast<size_t>(f * stride + j);
      if (s < y.size()) patches(f, j) = static_cast<float>(y[s]);
    }
  return nn::Relu(proj_(nn::Constant(std::move(patches))));
}

AudioDecoder::AudioDecoder(nn::ParamStore &store, const std::string &name,
                           const EncoderConfig &cfg)
    : cfg_(cfg), proj_(store, name, cfg.channels_N, cfg.kernel_L, false) {
  cfg_.Validate();
}

Var AudioDecoder::operator()(const Var &h, size_t num_samples) const {
  const Index frames = h.rows();
  const int stride = cfg_.stride();
  // Each frame is two half-frames; half-frame r lands on output block
  // r / 2 + r % 2.
  Var halves = nn::Reshape(proj_(h), 2 * frames, stride);
  std::vector<int> idx(static_cast<size_t>(2 * frames));
  for (size_t r = 0; r < idx.size(); ++r) idx[r] = static_cast<int>(r / 2 + r % 2);
  Var blocks = nn::ScatterAddRows(halves, std::move(idx), frames + 1);
  Var wave = nn::Reshape(blocks, (frames + 1) * stride, 1);
  Require(static_cast<Index>(num_samples) <= wave.rows(), ErrorCode::kShapeMismatch,
          "audio_decode: too few frames for the requested length");
  return nn::SliceRows(wave, 0, static_cast<Index>(num_samples));
}

std::vector<int> UpsampleIndex(Index source, Index target) {
  Require(source > 0 && target >= source, ErrorCode::kShapeMismatch,
          "upsample_reference: target must be at least the source length");
  std::vector<int> idx(static_cast<size_t>(target));
  for (Index j = 0; j < target; ++j) idx[j] = static_cast<int>(j * source / target);
  return idx;
}

Var UpsampleReference(const Var &v, Index target_frames) {
  return nn::GatherRows(v, UpsampleIndex(v.rows(), target_frames));
}

std::vector<int> ChunkStarts(Index frames, int chunk) {
  const int hop = chunk / 2;
  std::vector<int> starts = {0};
  if (frames > chunk) {
    const Index count = (frames - chunk + hop - 1) / hop + 1;
    for (Index s = 1; s < count; ++s) starts.push_back(static_cast<int>(s * hop));
  }
  return starts;
}

std::vector<int> ChunkIndex(Index frames, int chunk) {
  std::vector<int> idx;
  for (int start : ChunkStarts(frames, chunk))
    for (int k = 0; k < chunk; ++k) idx.push_back(start + k < frames ? start + k : -1);
  return idx;
}

namespace {

// Position-major <-> chunk-major reordering of S chunks of `chunk` rows.
std::vector<int> TransposeIndex(int chunks, int chunk) {
  std::vector<int> idx(static_cast<size_t>(chunks) * chunk);
  for (int k = 0; k < chunk; ++k)
    for (int s = 0; s < chunks; ++s) idx[static_cast<size_t>(k) * chunks + s] = s * chunk + k;
  return idx;
}

std::vector<int> Inverse(const std::vector<int> &perm) {
  std::vector<int> inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

// Sums chunk rows back onto frames and divides by how many chunks cover
// each frame.
Var OverlapAdd(const Var &chunked, const std::vector<int> &idx, Index frames) {
  Mat inv_count = Mat::Zero(frames, chunked.cols());
  for (int i : idx)
    if (i >= 0) inv_count.row(i).array() += 1.0f;
  inv_count = inv_count.cwiseInverse();
  return nn::Mul(nn::ScatterAddRows(chunked, idx, frames), nn::Constant(std::move(inv_count)));
}

Mat Tile(const Mat &block, int times) {
  Mat out(block.rows() * times, block.cols());
  for (int t = 0; t < times; ++t) out.middleRows(t * block.rows(), block.rows()) = block;
  return out;
}

}  // namespace

DprnnSeparator::DprnnSeparator(nn::ParamStore &store, const std::string &name,
                               const DprnnConfig &cfg, int channels_N, int ref_dim)
    : cfg_(cfg), channels_N_(channels_N), ref_dim_(ref_dim) {
  cfg_.Validate();
  in_proj_ = nn::Linear(store, name + ".in", channels_N + ref_dim, cfg.feature_B);
  for (int r = 0; r < cfg.repeats_R; ++r) {
    const std::string b = name + ".block" + std::to_string(r);
    blocks_.push_back({nn::BiLstm(store, b + ".intra", cfg.feature_B, cfg.hidden),
                       nn::BiLstm(store, b + ".inter", cfg.feature_B, cfg.hidden),
                       nn::Linear(store, b + ".intra_proj", 2 * cfg.hidden, cfg.feature_B),
                       nn::Linear(store, b + ".inter_proj", 2 * cfg.hidden, cfg.feature_B),
                       nn::LayerNormLayer(store, b + ".intra_norm", cfg.feature_B),
                       nn::LayerNormLayer(store, b + ".inter_norm", cfg.feature_B)});
  }
  out_proj_ = nn::Linear(store, name + ".out", cfg.feature_B, channels_N);
}

Var DprnnSeparator::operator()(const Var &h, const Var &v) const {
  Require(h.cols() == channels_N_ && v.cols() == ref_dim_, ErrorCode::kShapeMismatch,
          "dprnn_separate: feature widths do not match the configuration");
  const Index frames = h.rows();
  Var x = in_proj_(nn::ConcatCols({h, UpsampleReference(v, frames)}));
  const auto idx = ChunkIndex(frames, cfg_.chunk_K);
  const int chunks = static_cast<int>(idx.size()) / cfg_.chunk_K;
  const auto to_intra = TransposeIndex(chunks, cfg_.chunk_K);
  const auto from_intra = Inverse(to_intra);
  Var c = nn::GatherRows(x, idx);  // chunk-major: time = chunk, batch = position
  for (const auto &b : blocks_) {
    Var intra = b.intra(nn::GatherRows(c, to_intra), chunks);
    c = nn::Add(c, b.intra_norm(nn::GatherRows(b.intra_proj(intra), from_intra)));
    c = nn::Add(c, b.inter_norm(b.inter_proj(b.inter(c, cfg_.chunk_K))));
  }
  return nn::Sigmoid(out_proj_(OverlapAdd(c, idx, frames)));
}

XModalSeparator::XModalSeparator(nn::ParamStore &store, const std::string &name,
                                 const XModalConfig &cfg, const EncoderConfig &enc, int ref_dim)
    : cfg_(cfg), enc_(enc), ref_dim_(ref_dim) {
  cfg_.Validate();
  in_norm_ = nn::LayerNormLayer(store, name + ".in_norm", enc.channels_N);
  in_proj_ = nn::Linear(store, name + ".in", enc.channels_N, cfg.width_N);
  ref_proj_ = nn::Linear(store, name + ".ref", ref_dim, cfg.width_N);
  for (int l = 0; l < cfg.n_intra; ++l)
    intra_.emplace_back(store, name + ".intra" + std::to_string(l), cfg.width_N, cfg.heads,
                        cfg.ff_dim);
  cross_ = nn::TransformerLayer(store, name + ".cross", cfg.width_N, cfg.heads, cfg.ff_dim, true);
  for (int l = 0; l < cfg.n_inter; ++l)
    inter_.emplace_back(store, name + ".inter" + std::to_string(l), cfg.width_N, cfg.heads,
                        cfg.ff_dim);
  out_proj_ = nn::Linear(store, name + ".out", cfg.width_N, enc.channels_N);
}

Var XModalSeparator::operator()(const Var &h, const Var &v) const {
  return Forward(h, v, nullptr);
}

Var XModalSeparator::Forward(const Var &h, const Var &v, std::vector<Mat> *weights) const {
  Require(h.cols() == enc_.channels_N && v.cols() == ref_dim_, ErrorCode::kShapeMismatch,
          "xmodal_separate: feature widths do not match the configuration");
  const Index frames = h.rows(), video = v.rows();
  const int C = cfg_.chunk_C;
  const auto idx = ChunkIndex(frames, C);
  const int chunks = static_cast<int>(idx.size()) / C;
  const double hop_s = static_cast<double>(enc_.stride()) / kSampleRate;
  const double centre_s = 0.5 * enc_.kernel_L / kSampleRate;

  Var c = nn::GatherRows(in_proj_(in_norm_(h)), idx);
  c = nn::AddConstant(c, Tile(nn::TimeEncoding(nn::FrameTimes(C, hop_s, 0.0), cfg_.width_N),
                              chunks));
  for (const auto &layer : intra_) c = layer(c, chunks);

  std::vector<double> audio_t(idx.size());
  for (size_t r = 0; r < idx.size(); ++r) {
    const int f = idx[r] >= 0 ? idx[r] : static_cast<int>(frames) - 1;
    audio_t[r] = centre_s + f * hop_s;
  }
  const auto video_t = nn::FrameTimes(video, 1.0 / kVideoFps, 0.5 / kVideoFps);
  Mat bias;
  if (cfg_.locality_s > 0.0) {
    bias.resize(static_cast<Index>(audio_t.size()), video);
    const double k = 0.5 / (cfg_.locality_s * cfg_.locality_s);
    for (Index r = 0; r < bias.rows(); ++r)
      for (Index j = 0; j < video; ++j) {
        const double d = audio_t[r] - video_t[j];
        bias(r, j) = static_cast<float>(-k * d * d);
      }
  }
  const Var query = nn::AddConstant(c, nn::TimeEncoding(audio_t, cfg_.width_N));
  const Var memory = nn::AddConstant(ref_proj_(v), nn::TimeEncoding(video_t, cfg_.width_N));
  c = cross_(query, memory, bias.size() ? &bias : nullptr, weights);

  if (!inter_.empty()) {
    const auto to_pos = TransposeIndex(chunks, C);
    Mat chunk_pe = nn::TimeEncoding(nn::FrameTimes(chunks, hop_s * C / 2, 0.0), cfg_.width_N);
    c = nn::AddConstant(nn::GatherRows(c, to_pos), Tile(chunk_pe, C));
    for (const auto &layer : inter_) c = layer(c, C);
    c = nn::GatherRows(c, Inverse(to_pos));
  }
  return nn::Sigmoid(out_proj_(OverlapAdd(c, idx, frames)));
}

}  // namespace aex
