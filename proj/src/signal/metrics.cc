// signal/metrics.cc

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

#include "signal/metrics.h"

#include <algorithm>
#include <cmath>

#include "base/error.h"

namespace aex {

std::string_view MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kSiSnr: return "si_snr";
    case MetricKind::kPower: return "power";
    case MetricKind::kSdrLoss: return "sdr_loss";
    case MetricKind::kSaSdrLoss: return "sa_sdr_loss";
    case MetricKind::kSadlLoss: return "sadl_loss";
  }
  return "unknown";
}

MetricValue SiSnr(std::span<const double> est, std::span<const double> ref) {
  Require(est.size() == ref.size(), ErrorCode::kLengthMismatch,
          "si_snr: estimate has " + std::to_string(est.size()) +
              " samples, reference " + std::to_string(ref.size()));
  double dot = 0.0, ref_energy = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    dot += est[i] * ref[i];
    ref_energy += ref[i] * ref[i];
  }
  Require(ref_energy >= kEps, ErrorCode::kSilentReference,
          "si_snr: reference energy below floor; score this clip with power");
  const double alpha = dot / ref_energy;
  double target_energy = 0.0, error_energy = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    const double t = alpha * ref[i];
    const double e = est[i] - t;
    target_energy += t * t;
    error_energy += e * e;
  }
  MetricValue out{0.0, MetricKind::kSiSnr, false};
  if (target_energy < kEps) {
    out.value = -kMetricCapDb;
    out.floored = true;
  } else if (error_energy < kEps) {
    out.value = kMetricCapDb;
    out.floored = true;
  } else {
    const double db = 10.0 * std::log10(target_energy / error_energy);
    out.value = std::clamp(db, -kMetricCapDb, kMetricCapDb);
    out.floored = out.value != db;
  }
  return out;
}

MetricValue SiSnr(const Waveform &estimate, const Waveform &reference) {
  return SiSnr(estimate.view(), reference.view());
}

MetricValue Power(const Waveform &estimate) {
  Require(!estimate.empty(), ErrorCode::kEmptySignal, "power of empty signal");
  const double per_second = estimate.Energy() / estimate.duration_s();
  MetricValue out{0.0, MetricKind::kPower, per_second < kEps};
  out.value = 10.0 * std::log10(std::max(per_second, kEps));
  return out;
}

double ActivePower(std::span<const double> x, std::span<const uint8_t> active) {
  if (!active.empty())
    Require(active.size() == x.size(), ErrorCode::kLengthMismatch,
            "activity mask length differs from signal length");
  double energy = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const bool on = active.empty() ? x[i] != 0.0 : active[i] != 0;
    if (!on) continue;
    energy += x[i] * x[i];
    ++count;
  }
  return count == 0 ? 0.0 : energy / static_cast<double>(count);
}

double ScaleForSnr(double target_power, double interferer_power, double snr_db) {
  Require(target_power > 0.0 && interferer_power > 0.0,
          ErrorCode::kZeroEnergySource, "mix_at_snr: source without energy");
  return std::sqrt(target_power / (interferer_power * std::pow(10.0, snr_db / 10.0)));
}

MixResult MixAtSnr(const Waveform &target, const Waveform &interferer,
                   double snr_db, std::span<const uint8_t> target_active,
                   std::span<const uint8_t> interferer_active) {
  Require(target.size() == interferer.size(), ErrorCode::kLengthMismatch,
          "mix_at_snr: sources differ in length");
  const double pt = ActivePower(target.view(), target_active);
  const double pi = ActivePower(interferer.view(), interferer_active);
  const double scale = ScaleForSnr(pt, pi, snr_db);
  std::vector<double> mix(target.size());
  for (size_t i = 0; i < mix.size(); ++i)
    mix[i] = target[i] + scale * interferer[i];
  return {Waveform(std::move(mix)), scale};
}

}  // namespace aex
