// asd/mfcc.h

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

#ifndef AEX_ASD_MFCC_H_
#define AEX_ASD_MFCC_H_

#include "nn/autograd.h"
#include "signal/waveform.h"

namespace aex {

struct MfccOptions {
  int num_coeffs = 13;
  double hop_ms = 10.0;
  double window_ms = 25.0;
  int num_mel_bins = 40;
  double low_hz = 20.0;
  double high_hz = 7600.0;
  /// Mel energies are floored here before the log, so silence maps to a
  /// fixed cepstrum instead of -inf.
  double energy_floor = 1e-4;
};

/// Frames centred at k * hop + hop / 2 with zero padding at both ends; the
/// frame count is 4 * VideoFrameCount(n). Throws kTooShort below one
/// analysis window.
nn::Mat Mfcc(const Waveform &audio, const MfccOptions &opts = {});

/// Averages every `factor` consecutive rows; a trailing partial group is
/// averaged over the rows it has.
nn::Mat AggregateFrames(const nn::Mat &frames, int factor);

/// MFCC at video rate: one row per video frame.
nn::Mat VideoRateMfcc(const Waveform &audio, const MfccOptions &opts = {});

}  // namespace aex

#endif  // AEX_ASD_MFCC_H_
