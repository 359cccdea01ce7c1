// scenario/scenario.cc

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

#include "scenario/scenario.h"

#include <algorithm>
#include <charconv>

#include "base/error.h"

namespace aex {

bool ActivityMask::AllZero() const {
  return std::all_of(values.begin(), values.end(), [](uint8_t v) { return v == 0; });
}

size_t ActivityMask::CountActive() const {
  return static_cast<size_t>(std::count_if(values.begin(), values.end(),
                                            [](uint8_t v) { return v != 0; }));
}

std::string_view ScenarioName(Scenario s) {
  static constexpr std::array<std::string_view, kNumScenarios> kNames = {
      "QQ", "SQ", "QS", "SS"};
  return kNames[static_cast<int>(s)];
}

Scenario ParseScenario(std::string_view name) {
  for (int i = 0; i < kNumScenarios; ++i)
    if (ScenarioName(static_cast<Scenario>(i)) == name) return static_cast<Scenario>(i);
  Fail(ErrorCode::kFormat, "unknown scenario label '" + std::string(name) + "'");
}

ScenarioSegmentation ScenarioSegmentation::FromSegments(std::vector<Segment> segments,
                                                        int sample_rate) {
  ScenarioSegmentation seg;
  seg.sample_rate = sample_rate;
  size_t expect = 0;
  std::array<size_t, kNumScenarios> counts{};
  for (const auto &s : segments) {
    if (s.start != expect || s.end <= s.start)
      Fail(ErrorCode::kFormat, "segments must partition the clip without gaps");
    seg.labels.insert(seg.labels.end(), s.length(), s.label);
    counts[static_cast<int>(s.label)] += s.length();
    expect = s.end;
  }
  for (int i = 0; i < kNumScenarios; ++i)
    seg.durations[i] = static_cast<double>(counts[i]) / sample_rate;
  seg.segments = std::move(segments);
  return seg;
}

ScenarioSegmentation SegmentScenarios(const ActivityMask &target,
                                     const ActivityMask &interference) {
  Require(target.size() == interference.size(), ErrorCode::kLengthMismatch,
          "segment: masks differ in length");
  Require(target.sample_rate == interference.sample_rate,
          ErrorCode::kLengthMismatch, "segment: masks differ in rate");
  std::vector<Segment> runs;
  const size_t n = target.size();
  for (size_t i = 0; i < n; ++i) {
    const Scenario label = ScenarioOf(target.values[i] != 0, interference.values[i] != 0);
    if (runs.empty() || runs.back().label != label)
      runs.push_back({i, i + 1, label});
    else
      runs.back().end = i + 1;
  }
  return ScenarioSegmentation::FromSegments(std::move(runs), target.sample_rate);
}

double OverlapRatio(const ScenarioSegmentation &seg) {
  // Integer sample counts keep the ratio exact for bucket boundaries.
  std::array<size_t, kNumScenarios> counts{};
  for (const auto &s : seg.segments) counts[static_cast<int>(s.label)] += s.length();
  const size_t speech = counts[1] + counts[2] + counts[3];
  Require(speech > 0, ErrorCode::kAllSilent, "overlap_ratio: clip has no speech");
  return static_cast<double>(counts[3]) / static_cast<double>(speech);
}

ClipCategory Classify(const ActivityMask &target, const ScenarioSegmentation &seg) {
  if (target.AllZero()) return {ClipKind::kTA, 0.0};
  return {ClipKind::kTP, OverlapRatio(seg)};
}

std::string_view BucketName(int bucket) {
  static constexpr std::array<std::string_view, kNumBuckets> kNames = {
      "0%", "(0,20]%", "(20,40]%", "(40,60]%", "(60,80]%", "(80,100]%"};
  Require(bucket >= 0 && bucket < kNumBuckets, ErrorCode::kOutOfRange,
          "bucket index " + std::to_string(bucket));
  return kNames[bucket];
}

int ParseBucket(std::string_view name) {
  for (int b = 0; b < kNumBuckets; ++b)
    if (BucketName(b) == name) return b;
  Fail(ErrorCode::kFormat, "unknown bucket '" + std::string(name) + "'");
}

int Bucket(double ratio) {
  Require(ratio >= 0.0 && ratio <= 1.0, ErrorCode::kOutOfRange,
          "overlap ratio " + std::to_string(ratio) + " outside [0,1]");
  if (ratio == 0.0) return 0;
  for (int b = 1; b < kNumBuckets; ++b)
    if (ratio <= b / 5.0) return b;
  return kNumBuckets - 1;
}

std::string_view CategorySlotName(int slot) {
  if (slot == 0) return "TA";
  return BucketName(slot - 1);
}

int CategorySlot(const ClipCategory &category) {
  return category.kind == ClipKind::kTA ? 0 : 1 + Bucket(category.overlap_ratio);
}

std::string ToRunLength(const ScenarioSegmentation &seg) {
  std::string out;
  for (const auto &s : seg.segments) {
    if (!out.empty()) out += ';';
    out += ScenarioName(s.label);
    out += ':' + std::to_string(s.start) + ':' + std::to_string(s.end);
  }
  return out;
}

ScenarioSegmentation FromRunLength(std::string_view text, int sample_rate) {
  std::vector<Segment> segs;
  auto parse_size = [&](std::string_view tok) {
    size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      Fail(ErrorCode::kFormat, "bad run-length index '" + std::string(tok) + "'");
    return v;
  };
  while (!text.empty()) {
    const auto semi = text.find(';');
    std::string_view item = text.substr(0, semi);
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    const auto c1 = item.find(':');
    const auto c2 = item.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      Fail(ErrorCode::kFormat, "bad run-length item '" + std::string(item) + "'");
    segs.push_back({parse_size(item.substr(c1 + 1, c2 - c1 - 1)),
                    parse_size(item.substr(c2 + 1)),
                    ParseScenario(item.substr(0, c1))});
  }
  return ScenarioSegmentation::FromSegments(std::move(segs), sample_rate);
}

}  // namespace aex
