// separator/separator.h

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

#ifndef AEX_SEPARATOR_SEPARATOR_H_
#define AEX_SEPARATOR_SEPARATOR_H_

#include <string>
#include <vector>

#include "base/kv_config.h"
#include "nn/layers.h"
#include "signal/waveform.h"

namespace aex {

struct EncoderConfig {
  int kernel_L = 16;
  int channels_N = 256;
  int stride() const { return kernel_L / 2; }
  void Validate() const;
};

struct DprnnConfig {
  int feature_B = 64;
  int chunk_K = 100;
  int repeats_R = 6;
  int hidden = 128;
  void Validate() const;
};

struct XModalConfig {
  int chunk_C = 160;
  int n_intra = 4;
  int n_inter = 4;
  int width_N = 256;
  int heads = 8;
  int ff_dim = 1024;
  /// Standard deviation (seconds) of the fixed Gaussian locality prior on
  /// audio-to-video attention; 0 disables it.
  double locality_s = 0.04;
  void Validate() const;
};

/// Number of encoder frames for `num_samples` after right padding to a
/// whole frame. Throws kTooShort below one kernel.
Eigen::Index EncoderFrames(size_t num_samples, const EncoderConfig &cfg);

/// Learned analysis filterbank: strided framing, bias-free projection, ReLU.
class AudioEncoder {
 public:
  AudioEncoder() = default;
  AudioEncoder(nn::ParamStore &store, const std::string &name, const EncoderConfig &cfg);
  nn::Var operator()(const Waveform &y) const;
  const EncoderConfig &config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  nn::Linear proj_;
};

/// Bias-free synthesis filterbank followed by overlap-add, trimmed to
/// `num_samples`. Output is num_samples x 1.
class AudioDecoder {
 public:
  AudioDecoder() = default;
  AudioDecoder(nn::ParamStore &store, const std::string &name, const EncoderConfig &cfg);
  nn::Var operator()(const nn::Var &h, size_t num_samples) const;

 private:
  EncoderConfig cfg_;
  nn::Linear proj_;
};

/// Row index map for nearest-frame repetition of `source` rows onto
/// `target` rows; source frame k covers targets j with floor(j*source/target)
/// == k, so any remainder shortens the final frame.
std::vector<int> UpsampleIndex(Eigen::Index source, Eigen::Index target);
nn::Var UpsampleReference(const nn::Var &v, Eigen::Index target_frames);

/// Start rows of 50%-overlapping chunks covering `frames` rows.
std::vector<int> ChunkStarts(Eigen::Index frames, int chunk);
/// Gather index laying chunks out back to back (chunk-major); -1 pads.
std::vector<int> ChunkIndex(Eigen::Index frames, int chunk);

class MaskNetwork {
 public:
  virtual ~MaskNetwork() = default;
  /// Returns a mask with the shape of h, entries in [0, 1].
  virtual nn::Var operator()(const nn::Var &h, const nn::Var &v) const = 0;
};

class DprnnSeparator : public MaskNetwork {
 public:
  DprnnSeparator(nn::ParamStore &store, const std::string &name, const DprnnConfig &cfg,
                 int channels_N, int ref_dim);
  nn::Var operator()(const nn::Var &h, const nn::Var &v) const override;

 private:
  struct Block {
    nn::BiLstm intra, inter;
    nn::Linear intra_proj, inter_proj;
    nn::LayerNormLayer intra_norm, inter_norm;
  };
  DprnnConfig cfg_;
  int channels_N_ = 0, ref_dim_ = 0;
  nn::Linear in_proj_, out_proj_;
  std::vector<Block> blocks_;
};

/// Intra-chunk transformer, audio-to-video cross-attention (the reference
/// stays at video rate), inter-chunk transformer, overlap-add, sigmoid.
class XModalSeparator : public MaskNetwork {
 public:
  XModalSeparator(nn::ParamStore &store, const std::string &name, const XModalConfig &cfg,
                  const EncoderConfig &enc, int ref_dim);
  nn::Var operator()(const nn::Var &h, const nn::Var &v) const override;
  /// Also returns the cross-attention weights, one matrix per head with a
  /// row per chunked audio frame and a column per video frame.
  nn::Var Forward(const nn::Var &h, const nn::Var &v, std::vector<nn::Mat> *weights) const;

 private:
  XModalConfig cfg_;
  EncoderConfig enc_;
  int ref_dim_ = 0;
  nn::LayerNormLayer in_norm_;
  nn::Linear in_proj_, ref_proj_, out_proj_;
  std::vector<nn::TransformerLayer> intra_, inter_;
  nn::TransformerLayer cross_;
};

}  // namespace aex

#endif  // AEX_SEPARATOR_SEPARATOR_H_
