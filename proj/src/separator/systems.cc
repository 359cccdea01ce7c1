// separator/systems.cc

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

#include "separator/systems.h"

#include <optional>
#include <sstream>

#include "base/error.h"
#include "json.hpp"
#include "nn/checkpoint.h"
#include "nn/ops.h"

namespace aex {

using nn::Mat;
using nn::Var;

std::string SystemKindName(SystemKind kind) {
  switch (kind) {
    case SystemKind::kActiveExtract: return "active_extract";
    case SystemKind::kBaseline: return "baseline";
    case SystemKind::kGatedBaseline: return "gated_baseline";
  }
  return "?";
}

SystemKind ParseSystemKind(const std::string &name) {
  if (name == "active_extract") return SystemKind::kActiveExtract;
  if (name == "baseline") return SystemKind::kBaseline;
  if (name == "gated_baseline") return SystemKind::kGatedBaseline;
  Fail(ErrorCode::kConfig, "unknown system '" + name + "'");
}

std::string BackboneName(Backbone backbone) {
  return backbone == Backbone::kDprnn ? "dprnn" : "xmodal";
}

Backbone ParseBackbone(const std::string &name) {
  if (name == "dprnn") return Backbone::kDprnn;
  if (name == "xmodal") return Backbone::kXModal;
  Fail(ErrorCode::kConfig, "unknown backbone '" + name + "'");
}

SystemConfig SystemConfig::Preset(const std::string &name, Backbone backbone) {
  SystemConfig c;
  c.preset = name;
  c.backbone = backbone;
  if (name == "full") {
    c.encoder = {backbone == Backbone::kDprnn ? 40 : 16, 256};
    c.dprnn = {64, 100, 6, 128};
    c.xmodal = {160, 4, 4, 256, 8, 1024, 0.04};
  } else if (name == "toy") {
    c.encoder = {64, 64};
    c.dprnn = {32, 50, 1, 32};
    c.xmodal = {50, 1, 1, 64, 4, 128, 0.04};
  } else {
    Fail(ErrorCode::kConfig, "unknown model preset '" + name + "'");
  }
  return c;
}

SystemConfig SystemConfig::FromKv(const KvConfig &kv) {
  SystemConfig c = Preset(kv.GetString("model.preset", "toy"),
                          ParseBackbone(kv.GetString("model.backbone", "xmodal")));
  c.kind = ParseSystemKind(kv.GetString("model.kind", SystemKindName(c.kind)));
  c.mode = ParseReferenceMode(kv.GetString("model.mode", ReferenceModeName(c.mode)));
  c.frontend_dim = static_cast<int>(kv.GetInt("model.frontend_dim", c.frontend_dim));
  c.gate_threshold = kv.GetDouble("model.gate_threshold", c.gate_threshold);
  c.freeze_asd = kv.GetBool("model.freeze_asd", c.freeze_asd);
  c.seed = kv.GetU64("model.seed", c.seed);
  auto geti = [&](const std::string &key, int &field) {
    field = static_cast<int>(kv.GetInt(key, field));
  };
  geti("encoder.kernel_L", c.encoder.kernel_L);
  geti("encoder.channels_N", c.encoder.channels_N);
  geti("dprnn.feature_B", c.dprnn.feature_B);
  geti("dprnn.chunk_K", c.dprnn.chunk_K);
  geti("dprnn.repeats_R", c.dprnn.repeats_R);
  geti("dprnn.hidden", c.dprnn.hidden);
  geti("xmodal.chunk_C", c.xmodal.chunk_C);
  geti("xmodal.n_intra", c.xmodal.n_intra);
  geti("xmodal.n_inter", c.xmodal.n_inter);
  geti("xmodal.width_N", c.xmodal.width_N);
  geti("xmodal.heads", c.xmodal.heads);
  geti("xmodal.ff_dim", c.xmodal.ff_dim);
  c.xmodal.locality_s = kv.GetDouble("xmodal.locality_s", c.xmodal.locality_s);
  c.asd = AsdConfig::FromKv(kv);
  c.Validate();
  return c;
}

void SystemConfig::ToKv(KvConfig *kv) const {
  kv->Set("model.kind", SystemKindName(kind));
  kv->Set("model.mode", ReferenceModeName(mode));
  kv->Set("model.backbone", BackboneName(backbone));
  kv->Set("model.preset", preset);
  kv->Set("model.frontend_dim", std::to_string(frontend_dim));
  kv->Set("model.gate_threshold", std::to_string(gate_threshold));
  kv->Set("model.freeze_asd", freeze_asd ? "true" : "false");
  kv->Set("model.seed", std::to_string(seed));
  kv->Set("encoder.kernel_L", std::to_string(encoder.kernel_L));
  kv->Set("encoder.channels_N", std::to_string(encoder.channels_N));
  kv->Set("dprnn.feature_B", std::to_string(dprnn.feature_B));
  kv->Set("dprnn.chunk_K", std::to_string(dprnn.chunk_K));
  kv->Set("dprnn.repeats_R", std::to_string(dprnn.repeats_R));
  kv->Set("dprnn.hidden", std::to_string(dprnn.hidden));
  kv->Set("xmodal.chunk_C", std::to_string(xmodal.chunk_C));
  kv->Set("xmodal.n_intra", std::to_string(xmodal.n_intra));
  kv->Set("xmodal.n_inter", std::to_string(xmodal.n_inter));
  kv->Set("xmodal.width_N", std::to_string(xmodal.width_N));
  kv->Set("xmodal.heads", std::to_string(xmodal.heads));
  kv->Set("xmodal.ff_dim", std::to_string(xmodal.ff_dim));
  kv->Set("xmodal.locality_s", std::to_string(xmodal.locality_s));
  asd.ToKv(kv);
}

int SystemConfig::RefDim() const {
  return kind == SystemKind::kActiveExtract ? ReferenceDim(mode, asd) : frontend_dim;
}

void SystemConfig::Validate() const {
  encoder.Validate();
  dprnn.Validate();
  xmodal.Validate();
  asd.Validate();
  Require(frontend_dim > 0, ErrorCode::kConfig, "model.frontend_dim must be positive");
  Require(gate_threshold > 0.0 && gate_threshold < 1.0, ErrorCode::kConfig,
          "model.gate_threshold must lie in (0, 1)");
}

TseSystem::TseSystem(const SystemConfig &config)
    : config_(config), store_(DeriveSeed({config.seed, 0x5e9})) {
  config_.Validate();
  if (config_.kind != SystemKind::kBaseline) {
    AsdConfig asd = config_.asd;
    asd.seed = DeriveSeed({config_.seed, asd.seed});
    asd_ = std::make_unique<AsdModel>(asd);
  }
  encoder_ = AudioEncoder(store_, "encoder", config_.encoder);
  if (config_.kind != SystemKind::kActiveExtract) {
    frontend_.emplace_back(store_, "frontend.0", config_.asd.visual_dim_in,
                           config_.frontend_dim, 5);
    frontend_.emplace_back(store_, "frontend.1", config_.frontend_dim, config_.frontend_dim, 5);
  }
  if (config_.backbone == Backbone::kXModal) {
    auto x = std::make_unique<XModalSeparator>(store_, "separator", config_.xmodal,
                                               config_.encoder, config_.RefDim());
    xmodal_ = x.get();
    separator_ = std::move(x);
  } else {
    separator_ = std::make_unique<DprnnSeparator>(store_, "separator", config_.dprnn,
                                                  config_.encoder.channels_N, config_.RefDim());
  }
  decoder_ = AudioDecoder(store_, "decoder", config_.encoder);
}

SystemOutput TseSystem::Forward(const Waveform &y, const VisualStream &visual,
                                const Mat *mfcc) const {
  SystemOutput out;
  out.mixture_feature = encoder_(y);
  Var ref;
  if (config_.kind == SystemKind::kActiveExtract) {
    std::optional<nn::NoGradGuard> frozen;
    if (config_.freeze_asd) frozen.emplace();
    out.asd = mfcc ? asd_->Forward(*mfcc, visual) : asd_->Forward(y, visual);
    ref = ReferenceFeatures(*out.asd, config_.mode);
  } else {
    const auto frames = static_cast<Eigen::Index>(visual.frames);
    ref = nn::Constant(Eigen::Map<const Mat>(visual.data.data(), frames, visual.dim));
    for (const auto &conv : frontend_) ref = nn::Relu(conv(ref));
  }
  out.mask = (*separator_)(out.mixture_feature, ref);
  out.estimate = decoder_(nn::Mul(out.mask, out.mixture_feature), y.size());
  return out;
}

namespace {

Waveform ToWaveform(const Var &column) {
  std::vector<double> s(static_cast<size_t>(column.rows()));
  for (size_t i = 0; i < s.size(); ++i) s[i] = column.value()(static_cast<Eigen::Index>(i), 0);
  return Waveform(std::move(s));
}

}  // namespace

bool TseSystem::GateDecision(const Waveform &y, const VisualStream &visual) const {
  Require(asd_ != nullptr, ErrorCode::kConfig, "system has no ASD gate");
  nn::NoGradGuard guard;
  return BinaryActivityOf(asd_->Forward(y, visual), config_.gate_threshold).clip_active;
}

Waveform TseSystem::ExtractWithGate(const Waveform &y, const VisualStream &visual,
                                    bool active) const {
  if (!active) return Waveform::Zeros(y.size());
  nn::NoGradGuard guard;
  return ToWaveform(Forward(y, visual).estimate);
}

Waveform TseSystem::Extract(const Waveform &y, const VisualStream &visual) const {
  if (config_.kind == SystemKind::kGatedBaseline)
    return ExtractWithGate(y, visual, GateDecision(y, visual));
  return ExtractWithGate(y, visual, true);
}

std::vector<Mat> TseSystem::CrossAttention(const Waveform &y, const VisualStream &visual) const {
  Require(xmodal_ != nullptr, ErrorCode::kConfig, "cross-attention needs the xmodal backbone");
  Require(config_.kind == SystemKind::kActiveExtract, ErrorCode::kConfig,
          "cross-attention inspection is for ActiveExtract");
  nn::NoGradGuard guard;
  const auto features = asd_->Forward(y, visual);
  std::vector<Mat> weights;
  xmodal_->Forward(encoder_(y), ReferenceFeatures(features, config_.mode), &weights);
  return weights;
}

std::vector<nn::ParamStore *> TseSystem::TrainableStores() {
  std::vector<nn::ParamStore *> stores = {&store_};
  if (config_.kind == SystemKind::kActiveExtract && !config_.freeze_asd)
    stores.push_back(&asd_->params());
  return stores;
}

void TseSystem::Save(const std::string &path, const std::string &stage,
                     const std::string &extra_json) const {
  KvConfig kv;
  config_.ToKv(&kv);
  nlohmann::json meta;
  meta["kind"] = "tse";
  meta["stage"] = stage;
  meta["config"] = kv.values();
  meta["extra"] = nlohmann::json::parse(extra_json);
  nn::Checkpoint ckpt;
  ckpt.metadata = meta.dump();
  ckpt.Add("extractor", store_);
  if (asd_) ckpt.Add("asd", asd_->params());
  ckpt.Save(path);
}

std::unique_ptr<TseSystem> TseSystem::Load(const std::string &path, std::string *stage) {
  const auto ckpt = nn::Checkpoint::Load(path);
  const auto meta = nlohmann::json::parse(ckpt.metadata);
  Require(meta.value("kind", "") == "tse", ErrorCode::kFormat,
          path + " is not an extraction checkpoint");
  KvConfig kv;
  for (const auto &[k, v] : meta.at("config").items()) kv.Set(k, v.get<std::string>());
  auto system = std::make_unique<TseSystem>(SystemConfig::FromKv(kv));
  ckpt.Restore("extractor", system->store_);
  if (system->asd_) ckpt.Restore("asd", system->asd_->params());
  if (stage) *stage = meta.value("stage", "");
  return system;
}

void TseSystem::LoadWeights(const std::string &path, std::string *stage) {
  const auto ckpt = nn::Checkpoint::Load(path);
  const auto meta = nlohmann::json::parse(ckpt.metadata);
  Require(meta.value("kind", "") == "tse", ErrorCode::kFormat,
          path + " is not an extraction checkpoint");
  ckpt.Restore("extractor", store_);
  if (asd_) ckpt.Restore("asd", asd_->params());
  if (stage) *stage = meta.value("stage", "");
}

void TseSystem::LoadAsd(const std::string &path) {
  Require(asd_ != nullptr, ErrorCode::kConfig, "system has no ASD");
  const auto ckpt = nn::Checkpoint::Load(path);
  ckpt.Restore("asd", asd_->params());
}

std::string TseSystem::ModelCard(const std::string &stage) const {
  KvConfig kv;
  config_.ToKv(&kv);
  std::ostringstream os;
  os << "system: " << SystemKindName(config_.kind) << "\n"
     << "preset: " << config_.preset << "\n"
     << "backbone: " << BackboneName(config_.backbone) << "\n"
     << "reference: " << ReferenceModeName(config_.mode) << " (" << config_.RefDim()
     << "-d)\n"
     << "seed: " << config_.seed << "\n"
     << "stage: " << stage << "\n"
     << "extractor parameters: " << store_.NumParameters() << "\n";
  if (asd_) os << "asd parameters: " << asd_->params().NumParameters() << "\n";
  os << "\n" << kv.Dump();
  return os.str();
}

}  // namespace aex
