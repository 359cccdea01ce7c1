// asd/asd.h

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

#ifndef AEX_ASD_ASD_H_
#define AEX_ASD_ASD_H_

#include <cstdint>
#include <string>
#include <vector>

#include "asd/mfcc.h"
#include "base/kv_config.h"
#include "mixer/visual.h"
#include "nn/checkpoint.h"
#include "nn/layers.h"
#include "signal/waveform.h"

namespace aex {

struct AsdConfig {
  int mfcc_coeffs = 13;
  double mfcc_hop_ms = 10.0;
  int visual_dim_in = 20;
  int d_v = 128;   // width of F_a, F_v, P_a, P_v
  int d_av = 256;  // width of P_av
  int attention_heads = 8;
  int encoder_layers = 2;
  int kernel = 5;
  int ff_dim = 256;
  uint64_t seed = 1;

  /// Keys are prefixed with "asd." in the flat config.
  static AsdConfig FromKv(const KvConfig &kv);
  void ToKv(KvConfig *kv) const;
  void Validate() const;
};

/// All sequences have one row per video frame.
struct AsdFeatures {
  nn::Var f_a, f_v;
  nn::Var p_a, p_v;  // d_v wide
  nn::Var p_av;      // d_av wide
  nn::Var logits;    // frames x 1
  std::vector<double> activity_prob;
  Eigen::Index frames() const { return p_v.rows(); }
};

enum class ReferenceMode { kBoth, kPvOnly, kPavOnly };
std::string ReferenceModeName(ReferenceMode mode);
ReferenceMode ParseReferenceMode(const std::string &name);
int ReferenceDim(ReferenceMode mode, const AsdConfig &config);

class AsdModel {
 public:
  explicit AsdModel(const AsdConfig &config);

  /// Throws kDurationMismatch if audio and video differ by more than one
  /// video frame. Gradients are recorded unless a NoGradGuard is active.
  AsdFeatures Forward(const Waveform &audio, const VisualStream &visual) const;
  /// Same, with the video-rate MFCC precomputed.
  AsdFeatures Forward(const nn::Mat &mfcc, const VisualStream &visual) const;

  const AsdConfig &config() const { return config_; }
  nn::ParamStore &params() { return store_; }
  const nn::ParamStore &params() const { return store_; }

  /// Stand-alone checkpoint with the config in its metadata.
  void Save(const std::string &path) const;
  static AsdModel Load(const std::string &path);

 private:
  AsdConfig config_;
  nn::ParamStore store_;
  std::vector<nn::Conv1d> audio_convs_, visual_convs_;
  nn::TransformerLayer cross_av_, cross_va_, self_;
  nn::LayerNormLayer out_norm_;
  nn::Linear head_;
};

/// Frame-level binary cross-entropy. Throws kLabelLengthMismatch.
nn::Var AsdLoss(const AsdFeatures &features, const std::vector<uint8_t> &labels);

/// P_v || P_av, P_v alone or P_av alone.
nn::Var ReferenceFeatures(const AsdFeatures &features, ReferenceMode mode);

struct BinaryActivity {
  std::vector<uint8_t> frames;
  bool clip_active = false;
};

/// A frame is active when its probability is at least `threshold`; the clip
/// is active when any frame is.
BinaryActivity BinaryActivityOf(const AsdFeatures &features, double threshold = 0.5);
BinaryActivity BinaryActivityOf(const std::vector<double> &probs, double threshold = 0.5);

}  // namespace aex

#endif  // AEX_ASD_ASD_H_
