// losses/losses.cc

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

#include "losses/losses.h"

namespace aex {

std::string LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kSdr: return "sdr";
    case LossKind::kSaSdr: return "sa_sdr";
    case LossKind::kSadl: return "sadl";
  }
  return "sdr";
}

LossKind ParseLossKind(const std::string &name) {
  if (name == "sdr") return LossKind::kSdr;
  if (name == "sa_sdr") return LossKind::kSaSdr;
  if (name == "sadl") return LossKind::kSadl;
  Fail(ErrorCode::kConfig, "unknown loss kind '" + name + "'");
}

LossConfig LossConfig::Preset(const std::string &name) {
  if (name == "sdr") return {LossKind::kSdr, {}, kEps};
  if (name == "sa_sdr") return {LossKind::kSaSdr, {}, kEps};
  if (name == "sadl_o") return {LossKind::kSadl, kSadlOriginal, kEps};
  if (name == "sadl_b") return {LossKind::kSadl, kSadlBest, kEps};
  Fail(ErrorCode::kConfig, "unknown loss preset '" + name + "'");
}

void LossConfig::Validate() const {
  Require(eps > 0.0, ErrorCode::kConfig, "loss eps must be positive");
  if (kind == LossKind::kSadl) {
    Require(sadl_weights.qq >= 0 && sadl_weights.sq >= 0 && sadl_weights.ss >= 0 &&
                sadl_weights.qs >= 0,
            ErrorCode::kConfig, "sadl weights must be non-negative");
    Require(sadl_weights.qq + sadl_weights.sq + sadl_weights.ss + sadl_weights.qs > 0,
            ErrorCode::kConfig, "sadl needs at least one positive weight");
  }
}

std::vector<Segment> SadlSegments(const ScenarioSegmentation &seg) {
  std::vector<Segment> segs = seg.segments;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < segs.size(); ++i) {
      if (!TargetSpeaking(segs[i].label) || segs[i].length() >= kMinSdrSegment) continue;
      const bool left = i > 0 && TargetSpeaking(segs[i - 1].label);
      const bool right = i + 1 < segs.size() && TargetSpeaking(segs[i + 1].label);
      if (!left && !right) continue;
      const bool use_left =
          left && (!right || segs[i - 1].length() >= segs[i + 1].length());
      if (use_left) {
        segs[i - 1].end = segs[i].end;
      } else {
        segs[i + 1].start = segs[i].start;
      }
      segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
  }
  return segs;
}

}  // namespace aex
