// scenario/scenario.h

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

#ifndef AEX_SCENARIO_SCENARIO_H_
#define AEX_SCENARIO_SCENARIO_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "signal/waveform.h"

namespace aex {

/// Per-sample speaking activity (1 = speaking).
struct ActivityMask {
  std::vector<uint8_t> values;
  int sample_rate = kSampleRate;

  size_t size() const { return values.size(); }
  bool AllZero() const;
  size_t CountActive() const;
};

/// (target, interference) activity: Quiet/Speaking for each.
enum class Scenario : uint8_t { kQQ = 0, kSQ = 1, kQS = 2, kSS = 3 };
inline constexpr int kNumScenarios = 4;

std::string_view ScenarioName(Scenario s);
Scenario ParseScenario(std::string_view name);

inline Scenario ScenarioOf(bool target_on, bool interference_on) {
  return static_cast<Scenario>((target_on ? 1 : 0) | (interference_on ? 2 : 0));
}
inline bool TargetSpeaking(Scenario s) {
  return s == Scenario::kSQ || s == Scenario::kSS;
}

struct Segment {
  size_t start = 0;  // inclusive sample index
  size_t end = 0;    // exclusive
  Scenario label = Scenario::kQQ;

  size_t length() const { return end - start; }
  bool operator==(const Segment &) const = default;
};

struct ScenarioSegmentation {
  std::vector<Scenario> labels;    // one per sample
  std::vector<Segment> segments;   // maximal runs, partitioning [0, size)
  std::array<double, kNumScenarios> durations{};  // seconds, indexed by label
  int sample_rate = kSampleRate;

  size_t size() const { return labels.size(); }
  double Duration(Scenario s) const { return durations[static_cast<int>(s)]; }

  /// Rebuilds labels/durations from runs; used by the run-length parser.
  static ScenarioSegmentation FromSegments(std::vector<Segment> segments,
                                           int sample_rate = kSampleRate);
};

ScenarioSegmentation SegmentScenarios(const ActivityMask &target,
                                     const ActivityMask &interference);

/// SS / (SQ + QS + SS). Throws kAllSilent when nobody speaks.
double OverlapRatio(const ScenarioSegmentation &seg);

enum class ClipKind : uint8_t { kTA, kTP };

struct ClipCategory {
  ClipKind kind = ClipKind::kTA;
  double overlap_ratio = 0.0;  // meaningful for TP only
  bool operator==(const ClipCategory &) const = default;
};

ClipCategory Classify(const ActivityMask &target, const ScenarioSegmentation &seg);

/// TP overlap buckets as reported: "0%" then half-open (a, b] in percent.
inline constexpr int kNumBuckets = 6;
std::string_view BucketName(int bucket);
int ParseBucket(std::string_view name);
/// Throws kOutOfRange outside [0, 1].
int Bucket(double ratio);

/// Histogram slots used by corpus configuration and statistics: TA followed
/// by the six TP buckets.
inline constexpr int kNumCategorySlots = 1 + kNumBuckets;
std::string_view CategorySlotName(int slot);
int CategorySlot(const ClipCategory &category);

/// Run-length text form "SQ:0:16000;SS:16000:24000;...".
std::string ToRunLength(const ScenarioSegmentation &seg);
ScenarioSegmentation FromRunLength(std::string_view text,
                                   int sample_rate = kSampleRate);

}  // namespace aex

#endif  // AEX_SCENARIO_SCENARIO_H_
