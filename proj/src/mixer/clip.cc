// mixer/clip.cc

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

#include "mixer/clip.h"

#include <algorithm>
#include <cmath>

#include "base/error.h"
#include "base/random.h"
#include "signal/metrics.h"

namespace aex {

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  Fail(ErrorCode::kFormat, "unknown split '" + std::string(name) + "'");
}

namespace {

size_t ToSamples(double seconds) {
  return static_cast<size_t>(std::llround(seconds * kSampleRate));
}

// Rounds onto a 2^-40 grid; sums of two such values below 2^12 are exact.
double Snap(double v) { return std::ldexp(std::nearbyint(std::ldexp(v, 40)), -40); }

struct Rendered {
  std::vector<double> signal;
  std::vector<double> envelope;
  ActivityMask mask;
};

Rendered RenderSource(const MixtureSpec &spec, const SourceSpec &src, std::string_view role,
                      const std::vector<SyntheticSpeaker> &pool, size_t n) {
  Rendered r;
  r.signal.assign(n, 0.0);
  r.envelope.assign(n, 0.0);
  r.mask.values.assign(n, 0);
  if (src.placements.empty()) return r;
  const SyntheticSpeaker &spk = FindSpeaker(pool, src.speaker_id);
  for (size_t i = 0; i < src.placements.size(); ++i) {
    const auto &p = src.placements[i];
    const size_t start = ToSamples(p.onset_s);
    const size_t len = ToSamples(p.duration_s);
    if (p.onset_s < 0.0 || len == 0 || start + len > n)
      Fail(ErrorCode::kPlacementOverflow,
           spec.clip_id + ": " + std::string(role) + " placement " + std::to_string(i) +
               " exceeds the clip bounds");
    const Utterance utt = SynthUtterance(spk, len, UtteranceSeed(spec, role, i));
    for (size_t k = 0; k < len; ++k) {
      if (r.mask.values[start + k])
        Fail(ErrorCode::kInvalidSpec, spec.clip_id + ": overlapping " + std::string(role) +
                                          " placements");
      r.signal[start + k] = utt.audio[k];
      r.envelope[start + k] = utt.envelope[k];
      r.mask.values[start + k] = 1;
    }
  }
  return r;
}

void ValidateSource(const MixtureSpec &spec, const SourceSpec &src, std::string_view role) {
  std::vector<Placement> sorted = src.placements;
  std::sort(sorted.begin(), sorted.end(),
            [](const Placement &a, const Placement &b) { return a.onset_s < b.onset_s; });
  for (size_t i = 0; i < sorted.size(); ++i) {
    const auto &p = sorted[i];
    if (p.onset_s < 0.0 || p.duration_s <= 0.0 ||
        ToSamples(p.onset_s) + ToSamples(p.duration_s) > ToSamples(spec.total_duration_s))
      Fail(ErrorCode::kPlacementOverflow,
           spec.clip_id + ": " + std::string(role) + " placement exceeds the clip bounds");
    if (i > 0 && ToSamples(sorted[i - 1].onset_s) + ToSamples(sorted[i - 1].duration_s) >
                     ToSamples(p.onset_s))
      Fail(ErrorCode::kInvalidSpec,
           spec.clip_id + ": overlapping " + std::string(role) + " placements");
  }
}

}  // namespace

void ValidateSpec(const MixtureSpec &spec) {
  Require(spec.total_duration_s > 0.0, ErrorCode::kInvalidSpec,
          spec.clip_id + ": non-positive duration");
  Require(spec.snr_db >= kMinSnrDb && spec.snr_db <= kMaxSnrDb, ErrorCode::kInvalidSpec,
          spec.clip_id + ": snr_db outside [-10, 10]");
  Require(!spec.interferer.placements.empty(), ErrorCode::kInvalidSpec,
          spec.clip_id + ": interferer has no placements");
  Require(spec.target.speaker_id != spec.interferer.speaker_id,
          ErrorCode::kInvalidSpec, spec.clip_id + ": target and interferer are the same speaker");
  ValidateSource(spec, spec.target, "target");
  ValidateSource(spec, spec.interferer, "interferer");
}

uint64_t UtteranceSeed(const MixtureSpec &spec, std::string_view role, size_t index) {
  const uint64_t role_tag = role == "target" ? 1 : 2;
  return DeriveSeed({spec.seed, role_tag, index});
}

const SyntheticSpeaker &FindSpeaker(const std::vector<SyntheticSpeaker> &pool,
                                    const std::string &speaker_id) {
  for (const auto &s : pool)
    if (s.speaker_id == speaker_id) return s;
  Fail(ErrorCode::kInvalidSpec, "unknown speaker '" + speaker_id + "'");
}

MixtureClip BuildClip(const MixtureSpec &spec, const std::vector<SyntheticSpeaker> &pool,
                      const VisualConfig &visual) {
  ValidateSpec(spec);
  const size_t n = ToSamples(spec.total_duration_s);
  Rendered tgt = RenderSource(spec, spec.target, "target", pool, n);
  Rendered itf = RenderSource(spec, spec.interferer, "interferer", pool, n);

  const bool target_present = !tgt.mask.AllZero();
  const double target_power = target_present ? ActivePower(tgt.signal, tgt.mask.values)
                                             : kNominalRms * kNominalRms;
  const double scale =
      ScaleForSnr(target_power, ActivePower(itf.signal, itf.mask.values), spec.snr_db);

  std::vector<double> clean(n), scaled(n), mix(n);
  for (size_t i = 0; i < n; ++i) {
    clean[i] = Snap(tgt.signal[i]);
    scaled[i] = Snap(scale * itf.signal[i]);
    mix[i] = clean[i] + scaled[i];
  }

  MixtureClip clip;
  clip.mixture = Waveform(std::move(mix));
  clip.target_clean = Waveform(std::move(clean));
  clip.interferer_scaled = Waveform(std::move(scaled));
  clip.target_mask = std::move(tgt.mask);
  clip.interference_mask = std::move(itf.mask);
  clip.segmentation = SegmentScenarios(clip.target_mask, clip.interference_mask);
  clip.category = Classify(clip.target_mask, clip.segmentation);
  clip.target_visual = RenderVisual(tgt.envelope, clip.target_mask,
                                    DeriveSeed({spec.seed, 0x7715}), visual);
  clip.target_visual.speaker_id = spec.target.speaker_id;
  clip.scale = scale;
  clip.spec = spec;
  return clip;
}

}  // namespace aex
