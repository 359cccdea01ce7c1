// signal/waveform.cc

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

#include "signal/waveform.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "base/error.h"

namespace aex {

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  Require(sample_rate_ == kSampleRate, ErrorCode::kUnsupportedRate,
          "expected " + std::to_string(kSampleRate) + " Hz, got " +
              std::to_string(sample_rate_));
  for (double v : samples_)
    Require(std::isfinite(v), ErrorCode::kNonFiniteSample,
            "waveform contains NaN or Inf");
}

Waveform Waveform::Zeros(size_t n, int sample_rate) {
  return Waveform(std::vector<double>(n, 0.0), sample_rate);
}

double Waveform::Energy() const {
  double e = 0.0;
  for (double v : samples_) e += v * v;
  return e;
}

namespace {

void PutU32(std::string &out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16(std::string &out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}
uint32_t GetU32(const std::string &b, size_t pos) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(b[pos + i]);
  return v;
}
uint16_t GetU16(const std::string &b, size_t pos) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[pos]) |
                               (static_cast<uint8_t>(b[pos + 1]) << 8));
}

}  // namespace

std::string EncodeWav(const Waveform &wave, size_t *clipped) {
  const uint32_t data_bytes = static_cast<uint32_t>(wave.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, 1);  // PCM
  PutU16(out, 1);  // mono
  PutU32(out, static_cast<uint32_t>(wave.sample_rate()));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate() * 2));
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  size_t n_clipped = 0;
  for (double v : wave.samples()) {
    double q = std::round(v * 32768.0);
    if (q > 32767.0) {
      q = 32767.0;
      ++n_clipped;
    } else if (q < -32768.0) {
      q = -32768.0;
      ++n_clipped;
    }
    PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  if (clipped) *clipped = n_clipped;
  return out;
}

Waveform DecodeWav(const std::string &b) {
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0)
    Fail(ErrorCode::kFormat, "not a RIFF/WAVE stream");
  size_t pos = 12;
  bool have_fmt = false;
  int rate = 0;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const uint32_t len = GetU32(b, pos + 4);
    const size_t body = pos + 8;
    if (body + len > b.size()) Fail(ErrorCode::kFormat, "truncated chunk " + id);
    if (id == "fmt ") {
      if (len < 16) Fail(ErrorCode::kFormat, "short fmt chunk");
      if (GetU16(b, body) != 1 || GetU16(b, body + 2) != 1 ||
          GetU16(b, body + 14) != 16)
        Fail(ErrorCode::kFormat, "only PCM16 mono is supported");
      rate = static_cast<int>(GetU32(b, body + 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) Fail(ErrorCode::kFormat, "data chunk before fmt chunk");
      std::vector<double> samples(len / 2);
      for (size_t i = 0; i < samples.size(); ++i)
        samples[i] = static_cast<int16_t>(GetU16(b, body + 2 * i)) / 32768.0;
      return Waveform(std::move(samples), rate);
    }
    pos = body + len + (len & 1);
  }
  Fail(ErrorCode::kFormat, "no data chunk");
}

size_t WriteWav(const std::string &path, const Waveform &wave) {
  size_t clipped = 0;
  const std::string bytes = EncodeWav(wave, &clipped);
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  return clipped;
}

Waveform ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return DecodeWav(ss.str());
}

}  // namespace aex
