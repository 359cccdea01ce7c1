// signal/metrics.h

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

#ifndef AEX_SIGNAL_METRICS_H_
#define AEX_SIGNAL_METRICS_H_

#include <cstdint>
#include <span>
#include <string_view>

#include "signal/waveform.h"

namespace aex {

/// Energy floor shared by metrics and losses.
inline constexpr double kEps = 1e-8;
/// Reports never show more than +/- this many dB.
inline constexpr double kMetricCapDb = 60.0;

enum class MetricKind { kSiSnr, kPower, kSdrLoss, kSaSdrLoss, kSadlLoss };

std::string_view MetricKindName(MetricKind kind);

struct MetricValue {
  double value = 0.0;
  MetricKind kind = MetricKind::kSiSnr;
  bool floored = false;  // an epsilon floor or the dB cap was applied
};

/// Scale-invariant SNR with squared norms in both numerator and denominator.
/// Throws kSilentReference when the reference has (near) zero energy; such
/// clips are scored with Power() instead.
MetricValue SiSnr(const Waveform &estimate, const Waveform &reference);
MetricValue SiSnr(std::span<const double> estimate,
                  std::span<const double> reference);

/// Energy per second in dB: 10 log10(max(||x||^2 / T_s, eps)).
MetricValue Power(const Waveform &estimate);

struct MixResult {
  Waveform mixture;
  double scale = 1.0;  // gain applied to the interferer
};

/// Mean power over active samples. An empty mask means "every nonzero
/// sample is active".
double ActivePower(std::span<const double> x, std::span<const uint8_t> active);

/// target + scale * interferer with scale chosen so that the active-region
/// power ratio equals snr_db.
MixResult MixAtSnr(const Waveform &target, const Waveform &interferer,
                   double snr_db, std::span<const uint8_t> target_active = {},
                   std::span<const uint8_t> interferer_active = {});

/// Gain that brings the interferer to snr_db below target_power.
double ScaleForSnr(double target_power, double interferer_power, double snr_db);

}  // namespace aex

#endif  // AEX_SIGNAL_METRICS_H_
