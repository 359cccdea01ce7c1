// signal/waveform.h

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

#ifndef AEX_SIGNAL_WAVEFORM_H_
#define AEX_SIGNAL_WAVEFORM_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aex {

/// Project-wide audio rate. Anything else is rejected rather than resampled.
inline constexpr int kSampleRate = 16000;

/// Mono audio in float64. Construction validates the rate and that every
/// sample is finite, so a Waveform in hand is always well-formed.
class Waveform {
 public:
  Waveform() = default;
  explicit Waveform(std::vector<double> samples, int sample_rate = kSampleRate);
  static Waveform Zeros(size_t n, int sample_rate = kSampleRate);

  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int sample_rate() const { return sample_rate_; }
  double duration_s() const {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  const std::vector<double> &samples() const { return samples_; }
  std::span<const double> view() const { return samples_; }
  double operator[](size_t i) const { return samples_[i]; }

  double Energy() const;

 private:
  std::vector<double> samples_;
  int sample_rate_ = kSampleRate;
};

/// Serialises to RIFF/WAVE, PCM signed 16-bit little-endian, mono, 16 kHz.
/// Samples outside [-1, 1) are clipped; the count is returned via `clipped`.
std::string EncodeWav(const Waveform &wave, size_t *clipped = nullptr);
Waveform DecodeWav(const std::string &bytes);

size_t WriteWav(const std::string &path, const Waveform &wave);
Waveform ReadWav(const std::string &path);

}  // namespace aex

#endif  // AEX_SIGNAL_WAVEFORM_H_
