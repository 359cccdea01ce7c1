// mixer/speaker.cc

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

#include "mixer/speaker.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "base/error.h"
#include "base/random.h"

namespace aex {

namespace {

constexpr double kMaxHarmonicHz = 5000.0;
constexpr double kEnvelopeFloor = 0.08;

double FormantGain(const std::vector<Formant> &formants, double f) {
  double g = 0.03;
  for (const auto &fm : formants) {
    const double z = (f - fm.center_hz) / fm.bandwidth_hz;
    g += std::exp(-0.5 * z * z);
  }
  return g;
}

}  // namespace

std::vector<SyntheticSpeaker> MakeSpeakerPool(int count, uint64_t seed) {
  Require(count >= 2, ErrorCode::kInvalidSpec, "need at least two speakers");
  Rng rng(DeriveSeed({seed, 0x5be4e7}));
  std::vector<int> slots(count);
  std::iota(slots.begin(), slots.end(), 0);
  for (int i = count - 1; i > 0; --i)
    std::swap(slots[i], slots[rng.UniformInt(0, i)]);
  std::vector<SyntheticSpeaker> pool;
  for (int i = 0; i < count; ++i) {
    SyntheticSpeaker spk;
    char id[16];
    std::snprintf(id, sizeof(id), "spk%02d", i);
    spk.speaker_id = id;
    spk.fundamental_hz = 90.0 + 20.0 * slots[i];
    spk.formant_profile = {
        {rng.Uniform(300.0, 900.0), rng.Uniform(60.0, 160.0)},
        {rng.Uniform(1000.0, 2300.0), rng.Uniform(90.0, 220.0)},
        {rng.Uniform(2500.0, 3800.0), rng.Uniform(120.0, 300.0)},
    };
    spk.modulation_seed = rng.NextU64();
    pool.push_back(std::move(spk));
  }
  return pool;
}

Utterance SynthUtterance(const SyntheticSpeaker &speaker, double duration_s,
                         uint64_t seed) {
  Require(duration_s > 0.0, ErrorCode::kInvalidSpec, "utterance duration must be positive");
  return SynthUtterance(speaker,
                        static_cast<size_t>(std::llround(duration_s * kSampleRate)), seed);
}

Utterance SynthUtterance(const SyntheticSpeaker &speaker, size_t n, uint64_t seed) {
  Require(n > 0, ErrorCode::kInvalidSpec, "utterance duration must be positive");
  Rng rng(DeriveSeed({seed, speaker.modulation_seed}));
  const double fs = kSampleRate;

  // Syllabic envelope: raised-sine bumps at 4-8 Hz over a small floor.
  std::vector<double> env(n);
  const double rate = rng.Uniform(4.0, 8.0);
  size_t pos = 0;
  while (pos < n) {
    const size_t len = std::max<size_t>(
        1, static_cast<size_t>(fs / rate * rng.Uniform(0.7, 1.3)));
    const double amp = rng.Uniform(0.5, 1.0);
    for (size_t i = 0; i < len && pos + i < n; ++i) {
      const double s = std::sin(M_PI * (i + 0.5) / len);
      env[pos + i] = kEnvelopeFloor + (1.0 - kEnvelopeFloor) * amp * s * s;
    }
    pos += len;
  }

  // Harmonic stack via a unit phasor raised to successive powers; the
  // fundamental wanders slowly around the speaker's nominal pitch.
  const double f0 = speaker.fundamental_hz;
  const int harmonics = std::max(1, static_cast<int>(kMaxHarmonicHz / (f0 * 1.06)));
  std::vector<std::complex<double>> coeff(harmonics);
  for (int k = 0; k < harmonics; ++k) {
    const double a = FormantGain(speaker.formant_profile, (k + 1) * f0) / std::sqrt(k + 1.0);
    coeff[k] = std::polar(a, rng.Uniform(0.0, 2.0 * M_PI));
  }
  const double vib_rate = rng.Uniform(0.4, 1.0), vib_phase = rng.Uniform(0.0, 2.0 * M_PI);
  const double jit_rate = rng.Uniform(2.5, 4.0), jit_phase = rng.Uniform(0.0, 2.0 * M_PI);
  double phase = rng.Uniform(0.0, 2.0 * M_PI);
  std::vector<double> x(n);
  double energy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = i / fs;
    const double f = f0 * (1.0 + 0.04 * std::sin(2.0 * M_PI * vib_rate * t + vib_phase) +
                           0.015 * std::sin(2.0 * M_PI * jit_rate * t + jit_phase));
    phase = std::fmod(phase + 2.0 * M_PI * f / fs, 2.0 * M_PI);
    const std::complex<double> z = std::polar(1.0, phase);
    std::complex<double> zk = z;
    double acc = 0.0;
    for (int k = 0; k < harmonics; ++k) {
      acc += (coeff[k] * zk).imag();
      zk *= z;
    }
    x[i] = env[i] * acc;
    energy += x[i] * x[i];
  }
  const double rms = std::sqrt(energy / n);
  const double gain = rms > 0.0 ? kNominalRms / rms : 0.0;
  for (double &v : x) v *= gain;
  return {Waveform(std::move(x)), std::move(env)};
}

}  // namespace aex
