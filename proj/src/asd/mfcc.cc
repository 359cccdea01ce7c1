// asd/mfcc.cc

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

#include "asd/mfcc.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

#include "base/error.h"
#include "mixer/visual.h"

namespace aex {

namespace {

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Triangular filters over FFT bins, rows = mel bins.
std::vector<std::vector<double>> MelBank(const MfccOptions &o, int fft_size) {
  const int bins = fft_size / 2 + 1;
  const double lo = HzToMel(o.low_hz), hi = HzToMel(o.high_hz);
  std::vector<std::vector<double>> bank(o.num_mel_bins, std::vector<double>(bins, 0.0));
  for (int m = 0; m < o.num_mel_bins; ++m) {
    const double left = lo + (hi - lo) * m / (o.num_mel_bins + 1);
    const double centre = lo + (hi - lo) * (m + 1) / (o.num_mel_bins + 1);
    const double right = lo + (hi - lo) * (m + 2) / (o.num_mel_bins + 1);
    for (int k = 0; k < bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * kSampleRate / fft_size);
      if (mel > left && mel < right)
        bank[m][k] = mel <= centre ? (mel - left) / (centre - left)
                                   : (right - mel) / (right - centre);
    }
  }
  return bank;
}

// FFTW planning is not thread safe.
std::mutex plan_mutex;

}  // namespace

nn::Mat Mfcc(const Waveform &audio, const MfccOptions &o) {
  const int window = static_cast<int>(std::lround(o.window_ms * kSampleRate / 1000.0));
  const int hop = static_cast<int>(std::lround(o.hop_ms * kSampleRate / 1000.0));
  Require(audio.size() >= static_cast<size_t>(window), ErrorCode::kTooShort,
          "mfcc: audio shorter than one analysis window");
  const int per_video = kSamplesPerVideoFrame / hop;
  const auto frames = static_cast<Eigen::Index>(VideoFrameCount(audio.size()) * per_video);
  const int fft_size = NextPow2(window);
  const int bins = fft_size / 2 + 1;
  const auto bank = MelBank(o, fft_size);

  std::vector<double> hamming(window);
  for (int i = 0; i < window; ++i)
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (window - 1));

  double *in = fftw_alloc_real(fft_size);
  fftw_complex *out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_r2c_1d(fft_size, in, out, FFTW_ESTIMATE);
  }

  nn::Mat result(frames, o.num_coeffs);
  std::vector<double> log_mel(o.num_mel_bins);
  const auto &x = audio.samples();
  const auto n = static_cast<long>(x.size());
  for (Eigen::Index f = 0; f < frames; ++f) {
    const long start = f * hop + hop / 2 - window / 2;
    for (int i = 0; i < fft_size; ++i) {
      const long s = start + i;
      in[i] = (i < window && s >= 0 && s < n) ? x[s] * hamming[i] : 0.0;
    }
    fftw_execute(plan);
    for (int m = 0; m < o.num_mel_bins; ++m) {
      double e = 0.0;
      for (int k = 0; k < bins; ++k)
        if (bank[m][k] > 0.0) e += bank[m][k] * (out[k][0] * out[k][0] + out[k][1] * out[k][1]);
      log_mel[m] = std::log10(std::max(e, o.energy_floor));
    }
    // Orthonormal DCT-II.
    for (int c = 0; c < o.num_coeffs; ++c) {
      double acc = 0.0;
      for (int m = 0; m < o.num_mel_bins; ++m)
        acc += log_mel[m] * std::cos(M_PI * c * (m + 0.5) / o.num_mel_bins);
      const double norm = std::sqrt((c == 0 ? 1.0 : 2.0) / o.num_mel_bins);
      result(f, c) = static_cast<float>(acc * norm);
    }
  }
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return result;
}

nn::Mat AggregateFrames(const nn::Mat &frames, int factor) {
  const Eigen::Index rows = (frames.rows() + factor - 1) / factor;
  nn::Mat out(rows, frames.cols());
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index begin = r * factor, count = std::min<Eigen::Index>(factor, frames.rows() - begin);
    out.row(r) = frames.middleRows(begin, count).colwise().mean();
  }
  return out;
}

nn::Mat VideoRateMfcc(const Waveform &audio, const MfccOptions &opts) {
  const int hop = static_cast<int>(std::lround(opts.hop_ms * kSampleRate / 1000.0));
  return AggregateFrames(Mfcc(audio, opts), kSamplesPerVideoFrame / hop);
}

}  // namespace aex
