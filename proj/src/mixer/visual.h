// mixer/visual.h

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

#ifndef AEX_MIXER_VISUAL_H_
#define AEX_MIXER_VISUAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scenario/scenario.h"

namespace aex {

inline constexpr int kVideoFps = 25;
inline constexpr int kSamplesPerVideoFrame = kSampleRate / kVideoFps;  // 640

/// Number of video frames covering `num_samples` audio samples.
size_t VideoFrameCount(size_t num_samples);

/// Frame-level label: a frame is active iff more than half of its samples are.
std::vector<uint8_t> FrameLabels(const ActivityMask &mask);

struct VisualConfig {
  int dim = 20;              // lip-aperture descriptor size
  double cue_snr_db = 10.0;  // envelope-to-noise ratio on active frames
  double closed_mouth_sd = 0.03;
  double descriptor_noise_sd = 0.02;
};

/// Lip-aperture proxy at 25 FPS. Row-major frames x dim.
struct VisualStream {
  std::vector<float> data;
  size_t frames = 0;
  int dim = 0;
  std::string speaker_id;

  std::span<const float> Frame(size_t i) const {
    return {data.data() + i * dim, static_cast<size_t>(dim)};
  }
  /// Scalar aperture recovered from a descriptor by projection on the
  /// mouth-opening profile.
  double Aperture(size_t i) const;
};

/// Fixed mouth-opening profile the descriptors are built on.
std::vector<double> ApertureProfile(int dim);

/// Active frames carry the frame-mean speech envelope plus noise at
/// cue_snr_db; inactive frames are closed-mouth noise around zero aperture.
VisualStream RenderVisual(std::span<const double> envelope, const ActivityMask &mask,
                          uint64_t seed, const VisualConfig &config = {});

/// Binary container: "AEVS", u32 frames, u32 dim, float32 data (little-endian).
void WriteVisual(const std::string &path, const VisualStream &stream);
VisualStream ReadVisual(const std::string &path);

}  // namespace aex

#endif  // AEX_MIXER_VISUAL_H_
