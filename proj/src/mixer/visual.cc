// mixer/visual.cc

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

#include "mixer/visual.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "base/error.h"
#include "base/random.h"

namespace aex {

size_t VideoFrameCount(size_t num_samples) {
  return (num_samples + kSamplesPerVideoFrame / 2) / kSamplesPerVideoFrame;
}

std::vector<uint8_t> FrameLabels(const ActivityMask &mask) {
  const size_t frames = VideoFrameCount(mask.size());
  std::vector<uint8_t> labels(frames, 0);
  for (size_t f = 0; f < frames; ++f) {
    const size_t begin = f * kSamplesPerVideoFrame;
    const size_t end = std::min(mask.size(), begin + kSamplesPerVideoFrame);
    size_t on = 0;
    for (size_t i = begin; i < end; ++i) on += mask.values[i] != 0;
    labels[f] = 2 * on > (end > begin ? end - begin : 0) ? 1 : 0;
  }
  return labels;
}

std::vector<double> ApertureProfile(int dim) {
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) p[d] = 0.6 + 0.4 * std::sin(M_PI * (d + 0.5) / dim);
  return p;
}

double VisualStream::Aperture(size_t i) const {
  const auto profile = ApertureProfile(dim);
  double num = 0.0, den = 0.0;
  const auto f = Frame(i);
  for (int d = 0; d < dim; ++d) {
    num += f[d] * profile[d];
    den += profile[d] * profile[d];
  }
  return num / den;
}

VisualStream RenderVisual(std::span<const double> envelope, const ActivityMask &mask,
                          uint64_t seed, const VisualConfig &config) {
  Require(envelope.size() == mask.size(), ErrorCode::kLengthMismatch,
          "render_visual: envelope and mask lengths differ");
  Require(config.dim > 0, ErrorCode::kInvalidSpec, "visual dim must be positive");
  const auto labels = FrameLabels(mask);
  const size_t frames = labels.size();

  std::vector<double> level(frames, 0.0);
  double active_power = 0.0;
  size_t active = 0;
  for (size_t f = 0; f < frames; ++f) {
    const size_t begin = f * kSamplesPerVideoFrame;
    const size_t end = std::min(envelope.size(), begin + kSamplesPerVideoFrame);
    double sum = 0.0;
    size_t cnt = 0;
    for (size_t i = begin; i < end; ++i) {
      if (!mask.values[i]) continue;
      sum += envelope[i];
      ++cnt;
    }
    if (labels[f] && cnt > 0) {
      level[f] = sum / cnt;
      active_power += level[f] * level[f];
      ++active;
    }
  }
  const double cue_sd =
      active ? std::sqrt(active_power / active / std::pow(10.0, config.cue_snr_db / 10.0))
             : 0.0;

  Rng rng(DeriveSeed({seed, 0x7157a1}));
  const auto profile = ApertureProfile(config.dim);
  VisualStream out;
  out.frames = frames;
  out.dim = config.dim;
  out.data.resize(frames * config.dim);
  for (size_t f = 0; f < frames; ++f) {
    const double aperture = labels[f] ? level[f] + rng.Normal(0.0, cue_sd)
                                      : std::abs(rng.Normal(0.0, config.closed_mouth_sd));
    for (int d = 0; d < config.dim; ++d)
      out.data[f * config.dim + d] = static_cast<float>(
          aperture * profile[d] + rng.Normal(0.0, config.descriptor_noise_sd));
  }
  return out;
}

void WriteVisual(const std::string &path, const VisualStream &s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path);
  const uint32_t header[2] = {static_cast<uint32_t>(s.frames), static_cast<uint32_t>(s.dim)};
  os.write("AEVS", 4);
  os.write(reinterpret_cast<const char *>(header), sizeof(header));
  os.write(reinterpret_cast<const char *>(s.data.data()),
           static_cast<std::streamsize>(s.data.size() * sizeof(float)));
}

VisualStream ReadVisual(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "cannot open " + path);
  char magic[4];
  uint32_t header[2];
  is.read(magic, 4);
  is.read(reinterpret_cast<char *>(header), sizeof(header));
  if (!is || std::memcmp(magic, "AEVS", 4) != 0)
    Fail(ErrorCode::kFormat, path + ": not a visual stream file");
  VisualStream s;
  s.frames = header[0];
  s.dim = static_cast<int>(header[1]);
  s.data.resize(s.frames * s.dim);
  is.read(reinterpret_cast<char *>(s.data.data()),
          static_cast<std::streamsize>(s.data.size() * sizeof(float)));
  if (!is) Fail(ErrorCode::kFormat, path + ": truncated visual stream");
  return s;
}

}  // namespace aex
