// mixer/clip.h

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

#ifndef AEX_MIXER_CLIP_H_
#define AEX_MIXER_CLIP_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mixer/speaker.h"
#include "mixer/visual.h"
#include "scenario/scenario.h"
#include "signal/waveform.h"

namespace aex {

enum class Split { kTrain, kValidation, kTest };
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct Placement {
  double onset_s = 0.0;
  double duration_s = 0.0;
  bool operator==(const Placement &) const = default;
};

struct SourceSpec {
  std::string speaker_id;
  std::vector<Placement> placements;
  bool operator==(const SourceSpec &) const = default;
};

inline constexpr double kMinSnrDb = -10.0;
inline constexpr double kMaxSnrDb = 10.0;

/// Full recipe for one clip; BuildClip is a pure function of it.
struct MixtureSpec {
  std::string clip_id;
  SourceSpec target;
  SourceSpec interferer;
  double snr_db = 0.0;
  double total_duration_s = 4.0;
  uint64_t seed = 0;
  Split split = Split::kTrain;
  bool operator==(const MixtureSpec &) const = default;
};

/// Validates placement bounds/overlaps and the SNR range.
void ValidateSpec(const MixtureSpec &spec);

/// Seed of the i-th utterance of a source ("target" or "interferer").
uint64_t UtteranceSeed(const MixtureSpec &spec, std::string_view role, size_t index);

struct MixtureClip {
  Waveform mixture;
  Waveform target_clean;        // zero wherever the target is quiet
  Waveform interferer_scaled;   // already multiplied by `scale`
  ActivityMask target_mask;
  ActivityMask interference_mask;
  VisualStream target_visual;
  ScenarioSegmentation segmentation;
  ClipCategory category;
  double scale = 1.0;
  MixtureSpec spec;
};

const SyntheticSpeaker &FindSpeaker(const std::vector<SyntheticSpeaker> &pool,
                                    const std::string &speaker_id);

/// Places utterances, scales the interferer to the requested active-region
/// SNR and renders the target's visual stream. Component signals are snapped
/// to a 2^-40 grid so that mixture - interferer_scaled == target_clean holds
/// bit-exactly. In TA clips the target power is taken as the nominal level.
MixtureClip BuildClip(const MixtureSpec &spec, const std::vector<SyntheticSpeaker> &pool,
                      const VisualConfig &visual = {});

}  // namespace aex

#endif  // AEX_MIXER_CLIP_H_
