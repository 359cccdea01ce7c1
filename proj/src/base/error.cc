// base/error.cc

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

#include "base/error.h"

namespace aex {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSilentReference: return "SilentReference";
    case ErrorCode::kEmptySignal: return "EmptySignal";
    case ErrorCode::kZeroEnergySource: return "ZeroEnergySource";
    case ErrorCode::kUnsupportedRate: return "UnsupportedRate";
    case ErrorCode::kNonFiniteSample: return "NonFiniteSample";
    case ErrorCode::kAllSilent: return "AllSilent";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kPlacementOverflow: return "PlacementOverflow";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kUnsatisfiableHistogram: return "UnsatisfiableHistogram";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kAllReferencesSilent: return "AllReferencesSilent";
    case ErrorCode::kEmptySegmentation: return "EmptySegmentation";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kDurationMismatch: return "DurationMismatch";
    case ErrorCode::kLabelLengthMismatch: return "LabelLengthMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kMissingPrerequisiteCheckpoint:
      return "MissingPrerequisiteCheckpoint";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kFormat: return "FormatError";
  }
  return "Unknown";
}

}  // namespace aex
