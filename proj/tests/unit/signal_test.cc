// tests/unit/signal_test.cc

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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "base/error.h"
#include "base/random.h"
#include "signal/metrics.h"
#include "signal/waveform.h"

using namespace aex;

namespace {

std::vector<double> RandomSignal(Rng &rng, size_t n) {
  std::vector<double> x(n);
  for (auto &v : x) v = rng.Normal(0.0, 0.1);
  return x;
}

// Straight transcription of the definition, long double throughout.
double OracleSiSnr(const std::vector<double> &est, const std::vector<double> &ref) {
  long double dot = 0, rr = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    dot += static_cast<long double>(est[i]) * ref[i];
    rr += static_cast<long double>(ref[i]) * ref[i];
  }
  long double pt = 0, pe = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    const long double t = dot / rr * ref[i];
    pt += t * t;
    pe += (est[i] - t) * (est[i] - t);
  }
  return static_cast<double>(10.0L * std::log10(pt / pe));
}

}  // namespace

TEST_CASE("waveform validation") {
  CHECK_THROWS_AS(Waveform({0.0}, 8000), Error);
  CHECK_THROWS_AS(Waveform({0.0, NAN}), Error);
  CHECK(Waveform::Zeros(16000).duration_s() == 1.0);
}

TEST_CASE("SI-SNR oracle values") {
  // Orthogonal error with a quarter of the target energy: 10 log10(4).
  std::vector<double> ref = {1, 0, 1, 0}, est = {1, 0.5, 1, 0.5};
  Waveform r(ref), e(est);
  CHECK(SiSnr(e, r).value == doctest::Approx(10 * std::log10(2.0 / 0.5)).epsilon(1e-12));
  CHECK(SiSnr(e, r).value == doctest::Approx(OracleSiSnr(est, ref)).epsilon(1e-12));
  CHECK(SiSnr(r, r).value == 60.0);
  CHECK(SiSnr(r, r).floored);
  CHECK(SiSnr(Waveform::Zeros(4), r).value == -60.0);
  CHECK_THROWS_AS(SiSnr(r, Waveform::Zeros(4)), Error);
  CHECK_THROWS_AS(SiSnr(r, Waveform::Zeros(5)), Error);
}

TEST_CASE("SI-SNR matches the oracle and is scale invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ref = RandomSignal(rng, 257);
    auto est = RandomSignal(rng, 257);
    for (size_t i = 0; i < est.size(); ++i) est[i] += ref[i];
    const double base = SiSnr(Waveform(est), Waveform(ref)).value;
    CHECK(base == doctest::Approx(OracleSiSnr(est, ref)).epsilon(1e-9));
    const double a = std::exp(rng.Uniform(-5, 5)), b = std::exp(rng.Uniform(-5, 5));
    std::vector<double> es = est, rs = ref;
    for (auto &v : es) v *= a;
    for (auto &v : rs) v *= b;
    CHECK(std::abs(SiSnr(Waveform(es), Waveform(rs)).value - base) < 1e-6);
  }
}

TEST_CASE("power metric") {
  // Energy per second: 16000 * 0.01 over one second.
  std::vector<double> x(16000, 0.1);
  const double p = Power(Waveform(x)).value;
  CHECK(p == doctest::Approx(10 * std::log10(160.0)).epsilon(1e-12));
  std::vector<double> y(32000, 0.1);
  CHECK(Power(Waveform(y)).value == doctest::Approx(p).epsilon(1e-12));
  for (auto &v : x) v *= std::sqrt(2.0);
  CHECK(Power(Waveform(x)).value - p == doctest::Approx(10 * std::log10(2.0)).epsilon(1e-9));
  CHECK(Power(Waveform::Zeros(16000)).value == -80.0);
  CHECK(Power(Waveform::Zeros(48000)).value == -80.0);
  CHECK(Power(Waveform::Zeros(16000)).floored);
  CHECK_THROWS_AS(Power(Waveform()), Error);
}

TEST_CASE("mixing at a requested SNR") {
  Rng rng(3);
  const auto t = RandomSignal(rng, 4000), i = RandomSignal(rng, 4000);
  for (double snr : {-10.0, -2.5, 0.0, 7.0, 10.0}) {
    const auto mix = MixAtSnr(Waveform(t), Waveform(i), snr);
    std::vector<double> scaled(i.size());
    for (size_t k = 0; k < i.size(); ++k) scaled[k] = mix.scale * i[k];
    const double achieved =
        10 * std::log10(Waveform(t).Energy() / Waveform(scaled).Energy());
    CHECK(std::abs(achieved - snr) < 1e-9);
  }
  // Equal powers at 0 dB need unit scale; 10 dB needs 1/sqrt(10).
  CHECK(ScaleForSnr(1.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(ScaleForSnr(1.0, 1.0, 10.0) == doctest::Approx(0.316227766).epsilon(1e-8));
  CHECK(ScaleForSnr(1.0, 4.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("active-region power ignores silence") {
  std::vector<double> x = {0, 0, 2, 2};
  std::vector<uint8_t> m = {0, 0, 1, 1};
  CHECK(ActivePower(x, m) == doctest::Approx(4.0));
  CHECK(ActivePower(x, {}) == doctest::Approx(4.0));
}

TEST_CASE("WAV round trip") {
  Rng rng(2);
  auto x = RandomSignal(rng, 1000);
  x[3] = 1.5;
  size_t clipped = 0;
  const auto bytes = EncodeWav(Waveform(x), &clipped);
  CHECK(clipped == 1);
  CHECK(bytes.size() == 44 + 2000);
  const auto back = DecodeWav(bytes);
  REQUIRE(back.size() == x.size());
  for (size_t i = 0; i < x.size(); ++i)
    if (i != 3) CHECK(std::abs(back[i] - x[i]) <= 0.5 / 32768 + 1e-12);
  CHECK(EncodeWav(back) == bytes);
}
