// separator/systems.h

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

#ifndef AEX_SEPARATOR_SYSTEMS_H_
#define AEX_SEPARATOR_SYSTEMS_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asd/asd.h"
#include "base/kv_config.h"
#include "separator/separator.h"

namespace aex {

enum class SystemKind { kActiveExtract, kBaseline, kGatedBaseline };
std::string SystemKindName(SystemKind kind);
SystemKind ParseSystemKind(const std::string &name);

enum class Backbone { kDprnn, kXModal };
std::string BackboneName(Backbone backbone);
Backbone ParseBackbone(const std::string &name);

struct SystemConfig {
  SystemKind kind = SystemKind::kActiveExtract;
  ReferenceMode mode = ReferenceMode::kBoth;
  Backbone backbone = Backbone::kXModal;
  std::string preset = "toy";
  AsdConfig asd;
  EncoderConfig encoder;
  DprnnConfig dprnn;
  XModalConfig xmodal;
  int frontend_dim = 256;  // lip-frontend width of the baselines
  double gate_threshold = 0.5;
  bool freeze_asd = false;
  uint64_t seed = 1;

  /// "toy" (CPU scale) or "full" (full-size widths) for the given backbone.
  static SystemConfig Preset(const std::string &name, Backbone backbone = Backbone::kXModal);
  /// Starts from `model.preset` and `model.backbone`, then applies any
  /// overrides under model.*, encoder.*, dprnn.*, xmodal.* and asd.*.
  static SystemConfig FromKv(const KvConfig &kv);
  void ToKv(KvConfig *kv) const;
  int RefDim() const;
  void Validate() const;
};

struct SystemOutput {
  nn::Var estimate;  // samples x 1
  nn::Var mask;      // encoder frames x N
  nn::Var mixture_feature;
  std::optional<AsdFeatures> asd;
};

/// Waveform encoder, reference network and mask estimator behind one
/// interface. ActiveExtract takes its reference from the ASD features; the
/// baselines use a lip frontend; the gated baseline additionally holds an
/// ASD used only as a clip-level gate.
class TseSystem {
 public:
  explicit TseSystem(const SystemConfig &config);

  /// Differentiable path. For the gated baseline this is the ungated
  /// extractor. `mfcc` optionally supplies precomputed video-rate MFCC.
  SystemOutput Forward(const Waveform &y, const VisualStream &visual,
                       const nn::Mat *mfcc = nullptr) const;
  /// Inference without gradients, gate applied where the system has one.
  Waveform Extract(const Waveform &y, const VisualStream &visual) const;
  /// Clip-level ASD decision of the gated baseline.
  bool GateDecision(const Waveform &y, const VisualStream &visual) const;
  /// Gated-baseline output for a given gate decision: exact zeros when
  /// inactive, the extractor output otherwise.
  Waveform ExtractWithGate(const Waveform &y, const VisualStream &visual, bool active) const;
  /// Cross-attention weights of the xmodal backbone for inspection.
  std::vector<nn::Mat> CrossAttention(const Waveform &y, const VisualStream &visual) const;

  const SystemConfig &config() const { return config_; }
  bool has_asd() const { return asd_ != nullptr; }
  AsdModel &asd() { return *asd_; }
  const AsdModel &asd() const { return *asd_; }
  nn::ParamStore &extractor_params() { return store_; }
  /// Stores updated by training: the extractor, plus the ASD of
  /// ActiveExtract unless frozen.
  std::vector<nn::ParamStore *> TrainableStores();

  /// Metadata carries the config, the stage tag and `extra` (JSON object).
  void Save(const std::string &path, const std::string &stage,
            const std::string &extra_json = "{}") const;
  static std::unique_ptr<TseSystem> Load(const std::string &path, std::string *stage = nullptr);
  /// Restores weights from a checkpoint written by Save(); the sections
  /// must match this system's parameter names and shapes.
  void LoadWeights(const std::string &path, std::string *stage = nullptr);
  /// Copies the ASD weights from a stand-alone ASD checkpoint.
  void LoadAsd(const std::string &path);
  std::string ModelCard(const std::string &stage) const;

 private:
  SystemConfig config_;
  std::unique_ptr<AsdModel> asd_;
  nn::ParamStore store_;
  AudioEncoder encoder_;
  AudioDecoder decoder_;
  std::vector<nn::Conv1d> frontend_;
  std::unique_ptr<MaskNetwork> separator_;
  XModalSeparator *xmodal_ = nullptr;
};

}  // namespace aex

#endif  // AEX_SEPARATOR_SYSTEMS_H_
