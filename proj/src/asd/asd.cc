// asd/asd.cc

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

#include "asd/asd.h"

#include <cmath>
#include <cstdlib>

#include "base/error.h"
#include "json.hpp"
#include "nn/ops.h"

namespace aex {

using nn::Mat;
using nn::Var;

std::string ReferenceModeName(ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::kBoth: return "both";
    case ReferenceMode::kPvOnly: return "pv_only";
    case ReferenceMode::kPavOnly: return "pav_only";
  }
  return "?";
}

ReferenceMode ParseReferenceMode(const std::string &name) {
  if (name == "both") return ReferenceMode::kBoth;
  if (name == "pv_only") return ReferenceMode::kPvOnly;
  if (name == "pav_only") return ReferenceMode::kPavOnly;
  Fail(ErrorCode::kConfig, "unknown reference mode '" + name + "'");
}

int ReferenceDim(ReferenceMode mode, const AsdConfig &config) {
  switch (mode) {
    case ReferenceMode::kBoth: return config.d_v + config.d_av;
    case ReferenceMode::kPvOnly: return config.d_v;
    case ReferenceMode::kPavOnly: return config.d_av;
  }
  return 0;
}

AsdConfig AsdConfig::FromKv(const KvConfig &kv) {
  AsdConfig c;
  c.mfcc_coeffs = static_cast<int>(kv.GetInt("asd.mfcc_coeffs", c.mfcc_coeffs));
  c.mfcc_hop_ms = kv.GetDouble("asd.mfcc_hop_ms", c.mfcc_hop_ms);
  c.visual_dim_in = static_cast<int>(kv.GetInt("asd.visual_dim_in", c.visual_dim_in));
  c.d_v = static_cast<int>(kv.GetInt("asd.d_v", c.d_v));
  c.d_av = static_cast<int>(kv.GetInt("asd.d_av", c.d_av));
  c.attention_heads = static_cast<int>(kv.GetInt("asd.attention_heads", c.attention_heads));
  c.encoder_layers = static_cast<int>(kv.GetInt("asd.encoder_layers", c.encoder_layers));
  c.kernel = static_cast<int>(kv.GetInt("asd.kernel", c.kernel));
  c.ff_dim = static_cast<int>(kv.GetInt("asd.ff_dim", c.ff_dim));
  c.seed = kv.GetU64("asd.seed", c.seed);
  c.Validate();
  return c;
}

void AsdConfig::ToKv(KvConfig *kv) const {
  kv->Set("asd.mfcc_coeffs", std::to_string(mfcc_coeffs));
  kv->Set("asd.mfcc_hop_ms", std::to_string(mfcc_hop_ms));
  kv->Set("asd.visual_dim_in", std::to_string(visual_dim_in));
  kv->Set("asd.d_v", std::to_string(d_v));
  kv->Set("asd.d_av", std::to_string(d_av));
  kv->Set("asd.attention_heads", std::to_string(attention_heads));
  kv->Set("asd.encoder_layers", std::to_string(encoder_layers));
  kv->Set("asd.kernel", std::to_string(kernel));
  kv->Set("asd.ff_dim", std::to_string(ff_dim));
  kv->Set("asd.seed", std::to_string(seed));
}

void AsdConfig::Validate() const {
  Require(d_v == 128 && d_av == 256, ErrorCode::kConfig, "asd widths are fixed at 128/256");
  Require(2 * d_v == d_av, ErrorCode::kConfig, "d_av must be twice d_v");
  Require(mfcc_coeffs > 0 && visual_dim_in > 0 && encoder_layers > 0 && ff_dim > 0,
          ErrorCode::kConfig, "asd sizes must be positive");
  Require(attention_heads > 0 && d_v % attention_heads == 0, ErrorCode::kConfig,
          "asd.d_v must divide by asd.attention_heads");
  Require(kernel % 2 == 1, ErrorCode::kConfig, "asd.kernel must be odd");
  Require(std::abs(mfcc_hop_ms * kVideoFps * 4 - 1000.0) < 1e-9, ErrorCode::kConfig,
          "asd.mfcc_hop_ms must give four MFCC frames per video frame");
}

AsdModel::AsdModel(const AsdConfig &config) : config_(config), store_(config.seed) {
  config_.Validate();
  for (int l = 0; l < config_.encoder_layers; ++l) {
    audio_convs_.emplace_back(store_, "audio_enc." + std::to_string(l),
                              l == 0 ? config_.mfcc_coeffs : config_.d_v, config_.d_v,
                              config_.kernel);
    visual_convs_.emplace_back(store_, "visual_enc." + std::to_string(l),
                               l == 0 ? config_.visual_dim_in : config_.d_v, config_.d_v,
                               config_.kernel);
  }
  cross_av_ = nn::TransformerLayer(store_, "cross_av", config_.d_v, config_.attention_heads,
                                   config_.ff_dim, true);
  cross_va_ = nn::TransformerLayer(store_, "cross_va", config_.d_v, config_.attention_heads,
                                   config_.ff_dim, true);
  self_ = nn::TransformerLayer(store_, "self", config_.d_av, config_.attention_heads,
                               config_.ff_dim);
  out_norm_ = nn::LayerNormLayer(store_, "out_norm", config_.d_av);
  head_ = nn::Linear(store_, "head", config_.d_av, 1);
}

AsdFeatures AsdModel::Forward(const Waveform &audio, const VisualStream &visual) const {
  MfccOptions opts;
  opts.num_coeffs = config_.mfcc_coeffs;
  opts.hop_ms = config_.mfcc_hop_ms;
  return Forward(VideoRateMfcc(audio, opts), visual);
}

AsdFeatures AsdModel::Forward(const Mat &mfcc, const VisualStream &visual) const {
  const auto frames = static_cast<Eigen::Index>(visual.frames);
  Require(std::abs(mfcc.rows() - frames) <= 1, ErrorCode::kDurationMismatch,
          "asd: audio has " + std::to_string(mfcc.rows()) + " video frames, visual has " +
              std::to_string(frames));
  Require(mfcc.cols() == config_.mfcc_coeffs, ErrorCode::kShapeMismatch, "asd: mfcc width");
  Require(static_cast<int>(visual.dim) == config_.visual_dim_in, ErrorCode::kShapeMismatch,
          "asd: visual descriptor width");
  Require(frames > 0, ErrorCode::kTooShort, "asd: empty visual stream");

  Mat a(frames, mfcc.cols());
  for (Eigen::Index r = 0; r < frames; ++r) a.row(r) = mfcc.row(std::min(r, mfcc.rows() - 1));
  // Cepstra span tens of units; bring them near unit scale.
  a *= 0.1f;
  const Mat v = Eigen::Map<const Mat>(visual.data.data(), frames, config_.visual_dim_in);

  AsdFeatures out;
  Var fa = nn::Constant(std::move(a)), fv = nn::Constant(v);
  for (const auto &conv : audio_convs_) fa = nn::Relu(conv(fa));
  for (const auto &conv : visual_convs_) fv = nn::Relu(conv(fv));
  out.f_a = fa;
  out.f_v = fv;

  const auto times = nn::FrameTimes(frames, 1.0 / kVideoFps, 0.5 / kVideoFps);
  const Mat pe = nn::TimeEncoding(times, config_.d_v);
  const Var qa = nn::AddConstant(fa, pe), qv = nn::AddConstant(fv, pe);
  out.p_v = cross_va_(qv, qa);
  out.p_a = cross_av_(qa, qv);
  out.p_av = self_(nn::AddConstant(nn::ConcatCols({out.p_a, out.p_v}),
                                   nn::TimeEncoding(times, config_.d_av)));
  out.logits = head_(out_norm_(out.p_av));
  out.activity_prob.resize(static_cast<size_t>(frames));
  for (Eigen::Index r = 0; r < frames; ++r)
    out.activity_prob[r] = 1.0 / (1.0 + std::exp(-static_cast<double>(out.logits.value()(r, 0))));
  return out;
}

void AsdModel::Save(const std::string &path) const {
  KvConfig kv;
  config_.ToKv(&kv);
  nlohmann::json meta;
  meta["kind"] = "asd";
  meta["stage"] = "asd_pretrain";
  meta["config"] = kv.values();
  nn::Checkpoint ckpt;
  ckpt.metadata = meta.dump();
  ckpt.Add("asd", store_);
  ckpt.Save(path);
}

AsdModel AsdModel::Load(const std::string &path) {
  const auto ckpt = nn::Checkpoint::Load(path);
  const auto meta = nlohmann::json::parse(ckpt.metadata);
  KvConfig kv;
  for (const auto &[k, val] : meta.at("config").items()) kv.Set(k, val.get<std::string>());
  AsdModel model(AsdConfig::FromKv(kv));
  ckpt.Restore("asd", model.store_);
  return model;
}

Var AsdLoss(const AsdFeatures &features, const std::vector<uint8_t> &labels) {
  Require(static_cast<Eigen::Index>(labels.size()) == features.logits.rows(),
          ErrorCode::kLabelLengthMismatch,
          "asd: " + std::to_string(labels.size()) + " labels for " +
              std::to_string(features.logits.rows()) + " frames");
  return nn::BceWithLogits(features.logits, std::vector<float>(labels.begin(), labels.end()));
}

Var ReferenceFeatures(const AsdFeatures &features, ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::kBoth: return nn::ConcatCols({features.p_v, features.p_av});
    case ReferenceMode::kPvOnly: return features.p_v;
    case ReferenceMode::kPavOnly: return features.p_av;
  }
  return {};
}

BinaryActivity BinaryActivityOf(const std::vector<double> &probs, double threshold) {
  Require(threshold > 0.0 && threshold < 1.0, ErrorCode::kConfig,
          "activity threshold must lie in (0, 1)");
  BinaryActivity out;
  out.frames.resize(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    out.frames[i] = probs[i] >= threshold;
    out.clip_active = out.clip_active || out.frames[i];
  }
  return out;
}

BinaryActivity BinaryActivityOf(const AsdFeatures &features, double threshold) {
  return BinaryActivityOf(features.activity_prob, threshold);
}

}  // namespace aex
