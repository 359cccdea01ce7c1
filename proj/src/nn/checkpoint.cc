// nn/checkpoint.cc

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

#include "nn/checkpoint.h"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "base/error.h"

namespace aex::nn {

namespace {

constexpr char kMagic[] = "AEXCKPT1\n";

template <typename T>
void Put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <typename T>
T Get(std::istream &is, const std::string &path) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof v);
  Require(static_cast<bool>(is), ErrorCode::kFormat, "truncated checkpoint " + path);
  return v;
}

std::string GetBytes(std::istream &is, size_t n, const std::string &path) {
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  Require(static_cast<bool>(is), ErrorCode::kFormat, "truncated checkpoint " + path);
  return s;
}

}  // namespace

void Checkpoint::Add(const std::string &name, const ParamStore &store) {
  std::ostringstream os;
  store.Save(os);
  sections[name] = os.str();
}

void Checkpoint::Restore(const std::string &name, ParamStore &store) const {
  auto it = sections.find(name);
  Require(it != sections.end(), ErrorCode::kFormat, "checkpoint has no section " + name);
  std::istringstream is(it->second);
  store.Load(is);
}

void Checkpoint::Save(const std::string &path) const {
  std::ofstream os(path, std::ios::binary);
  Require(static_cast<bool>(os), ErrorCode::kIo, "cannot write " + path);
  os.write(kMagic, sizeof kMagic - 1);
  Put<uint64_t>(os, metadata.size());
  os.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  Put<uint32_t>(os, static_cast<uint32_t>(sections.size()));
  for (const auto &[name, blob] : sections) {
    Put<uint32_t>(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    Put<uint64_t>(os, blob.size());
    os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  }
  Require(static_cast<bool>(os), ErrorCode::kIo, "write failed for " + path);
}

Checkpoint Checkpoint::Load(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  Require(static_cast<bool>(is), ErrorCode::kIo, "cannot open " + path);
  Require(GetBytes(is, sizeof kMagic - 1, path) == kMagic, ErrorCode::kFormat,
          path + " is not a checkpoint");
  Checkpoint ckpt;
  ckpt.metadata = GetBytes(is, Get<uint64_t>(is, path), path);
  const auto count = Get<uint32_t>(is, path);
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = GetBytes(is, Get<uint32_t>(is, path), path);
    ckpt.sections[name] = GetBytes(is, Get<uint64_t>(is, path), path);
  }
  return ckpt;
}

}  // namespace aex::nn
