// base/error.h

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

#ifndef AEX_BASE_ERROR_H_
#define AEX_BASE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace aex {

enum class ErrorCode {
  kLengthMismatch,
  kSilentReference,
  kEmptySignal,
  kZeroEnergySource,
  kUnsupportedRate,
  kNonFiniteSample,
  kAllSilent,
  kOutOfRange,
  kPlacementOverflow,
  kInvalidSpec,
  kUnsatisfiableHistogram,
  kEmptyBatch,
  kAllReferencesSilent,
  kEmptySegmentation,
  kNonFiniteGradient,
  kTooShort,
  kDurationMismatch,
  kLabelLengthMismatch,
  kShapeMismatch,
  kMissingPrerequisiteCheckpoint,
  kDivergedLoss,
  kEmptyManifest,
  kConfig,
  kIo,
  kFormat,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and tests) can branch on the kind rather than the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

inline void Require(bool cond, ErrorCode code, const std::string &what) {
  if (!cond) Fail(code, what);
}

}  // namespace aex

#endif  // AEX_BASE_ERROR_H_
