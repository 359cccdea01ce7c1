// pipeline/checks.cc

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

#include "pipeline/checks.h"

#include <cmath>
#include <cstdio>

#include "base/error.h"
#include "base/random.h"
#include "losses/gradient_check.h"
#include "losses/losses.h"
#include "scenario/scenario.h"
#include "signal/metrics.h"

namespace aex {

namespace {

std::string Fmt(const char *fmt, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<double> Noise(Rng &rng, size_t n, double sd) {
  std::vector<double> x(n);
  for (auto &v : x) v = rng.Normal(0.0, sd);
  return x;
}

ActivityMask RandomRuns(Rng &rng, size_t n, double switch_p) {
  ActivityMask m;
  m.values.resize(n);
  uint8_t on = rng.Bernoulli(0.5);
  for (auto &v : m.values) {
    if (rng.Bernoulli(switch_p)) on ^= 1;
    v = on;
  }
  return m;
}

}  // namespace

std::vector<CheckResult> CheckMetrics(uint64_t seed, int trials) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto ref = Noise(rng, 512, 0.1);
    auto est = Noise(rng, 512, 0.1);
    for (size_t i = 0; i < est.size(); ++i) est[i] += ref[i];
    const double base = SiSnr(Waveform(est), Waveform(ref)).value;
    const double a = std::exp(rng.Uniform(-4, 4)), b = std::exp(rng.Uniform(-4, 4));
    for (auto &v : est) v *= a;
    auto scaled_ref = ref;
    for (auto &v : scaled_ref) v *= b;
    worst = std::max(worst, std::abs(SiSnr(Waveform(est), Waveform(scaled_ref)).value - base));
  }
  out.push_back({"si_snr_scale_invariance", worst <= 1e-6, Fmt("max deviation %.3g dB", worst)});

  auto x = Noise(rng, 16000, 0.1);
  const double p1 = Power(Waveform(x)).value;
  for (auto &v : x) v *= std::sqrt(2.0);
  const double shift = Power(Waveform(x)).value - p1;
  out.push_back({"power_doubling", std::abs(shift - 10.0 * std::log10(2.0)) < 1e-9,
                 Fmt("shift %.6f dB", shift)});

  bool routed = false;
  try {
    SiSnr(Waveform(x), Waveform::Zeros(x.size()));
  } catch (const Error &e) {
    routed = e.code() == ErrorCode::kSilentReference;
  }
  out.push_back({"silent_reference_error", routed, routed ? "raised" : "not raised"});
  const auto floor = Power(Waveform::Zeros(16000));
  out.push_back({"power_floor", floor.value == -80.0 && floor.floored,
                 Fmt("%.2f dB", floor.value)});
  return out;
}

std::vector<CheckResult> CheckGradients(uint64_t seed, size_t coords, double tolerance) {
  Rng rng(seed);
  const size_t n = 800;
  const auto ref = Noise(rng, n, 1.0), x0 = Noise(rng, n, 1.0);
  const auto seg = ScenarioSegmentation::FromSegments({{0, 200, Scenario::kQQ},
                                                       {200, 400, Scenario::kSQ},
                                                       {400, 600, Scenario::kSS},
                                                       {600, 800, Scenario::kQS}});
  std::span<const double> r(ref);
  const DifferentiableFn sdr = [&](std::span<const double> x, std::vector<double> *g) {
    return SdrLoss(x, r, kEps, g);
  };
  const DifferentiableFn sa_sdr = [&](std::span<const double> x, std::vector<double> *g) {
    std::vector<std::vector<double>> gs;
    const double v = SaSdrLoss<double>({x.first(n / 2), x.subspan(n / 2)},
                                       {r.first(n / 2), r.subspan(n / 2)}, kEps,
                                       g ? &gs : nullptr);
    if (g) {
      g->assign(gs[0].begin(), gs[0].end());
      g->insert(g->end(), gs[1].begin(), gs[1].end());
    }
    return v;
  };
  const DifferentiableFn sadl = [&](std::span<const double> x, std::vector<double> *g) {
    return SadlLoss(x, r, seg, kSadlOriginal, kEps, g);
  };
  std::vector<CheckResult> out;
  for (const auto &[name, fn] : {std::pair{"sdr_loss", sdr}, std::pair{"sa_sdr_loss", sa_sdr},
                                 std::pair{"sadl_loss", sadl}}) {
    const auto res = GradientCheck(fn, x0, 1e-4, coords, seed);
    out.push_back({std::string(name) + "_gradient",
                   res.max_relative_error < tolerance && res.coordinates == coords,
                   Fmt("max relative error %.3g", res.max_relative_error) + " over " +
                       std::to_string(res.coordinates) + " coordinates"});
  }
  return out;
}

std::vector<CheckResult> CheckScenarios(uint64_t seed, int trials) {
  Rng rng(seed);
  int mismatches = 0;
  double worst_samples = 0.0;
  for (int t = 0; t < trials; ++t) {
    const size_t n = static_cast<size_t>(rng.UniformInt(100, 4000));
    const auto tm = RandomRuns(rng, n, 0.005), im = RandomRuns(rng, n, 0.005);
    long counts[4] = {0, 0, 0, 0};
    for (size_t i = 0; i < n; ++i) ++counts[(tm.values[i] ? 1 : 0) | (im.values[i] ? 2 : 0)];
    const auto seg = SegmentScenarios(tm, im);
    for (int c = 0; c < 4; ++c)
      worst_samples = std::max(worst_samples,
                               std::abs(seg.durations[c] * kSampleRate - counts[c]));
    const long speech = counts[1] + counts[2] + counts[3];
    if (speech == 0) continue;
    const double expected = static_cast<double>(counts[3]) / speech;
    if (std::abs(OverlapRatio(seg) - expected) > 1.0 / speech) ++mismatches;
  }
  std::vector<CheckResult> out;
  out.push_back({"overlap_ratio_oracle", mismatches == 0 && worst_samples <= 1.0,
                 std::to_string(mismatches) + " mismatches, worst duration error " +
                     Fmt("%.3g samples", worst_samples)});
  const bool edges = Bucket(0.0) == 0 && Bucket(0.2) == 1 && Bucket(0.4) == 2 &&
                     Bucket(0.6) == 3 && Bucket(0.8) == 4 && Bucket(1.0) == 5 &&
                     Bucket(std::nextafter(0.2, 1.0)) == 2;
  out.push_back({"bucket_boundaries", edges, "right-closed buckets"});
  return out;
}

}  // namespace aex
