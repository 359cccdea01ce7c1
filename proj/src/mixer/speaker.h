// mixer/speaker.h

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

#ifndef AEX_MIXER_SPEAKER_H_
#define AEX_MIXER_SPEAKER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "signal/waveform.h"

namespace aex {

/// Active-region RMS every synthetic utterance is normalised to.
inline constexpr double kNominalRms = 0.05;

struct Formant {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
};

/// A toy talker: harmonic source at `fundamental_hz` shaped by a formant
/// envelope, amplitude-modulated at a syllabic rate.
struct SyntheticSpeaker {
  std::string speaker_id;
  double fundamental_hz = 120.0;
  std::vector<Formant> formant_profile;
  uint64_t modulation_seed = 0;
};

/// `count` speakers whose fundamentals lie on a 20 Hz grid, so any two differ
/// by at least 20 Hz. Deterministic in (count, seed).
std::vector<SyntheticSpeaker> MakeSpeakerPool(int count, uint64_t seed);

struct Utterance {
  Waveform audio;
  std::vector<double> envelope;  // per-sample amplitude envelope in [0, 1]
};

/// Deterministic harmonic-plus-modulation signal; bit-identical for identical
/// (speaker, duration, seed).
Utterance SynthUtterance(const SyntheticSpeaker &speaker, double duration_s,
                         uint64_t seed);
Utterance SynthUtterance(const SyntheticSpeaker &speaker, size_t num_samples,
                         uint64_t seed);

}  // namespace aex

#endif  // AEX_MIXER_SPEAKER_H_
