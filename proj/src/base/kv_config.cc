// base/kv_config.cc

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

#include "base/kv_config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "base/error.h"

namespace aex {

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string &key, const std::string &text) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception &) {
    Fail(ErrorCode::kConfig, "key '" + key + "': not a number: " + text);
  }
}

}  // namespace

KvConfig KvConfig::FromString(const std::string &text) {
  KvConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      Fail(ErrorCode::kConfig,
           "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = Trim(line.substr(0, eq));
    if (key.empty())
      Fail(ErrorCode::kConfig, "line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = Trim(line.substr(eq + 1));
  }
  return cfg;
}

KvConfig KvConfig::FromFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail(ErrorCode::kConfig, "cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return FromString(ss.str());
}

void KvConfig::Merge(const KvConfig &other) {
  for (const auto &[k, v] : other.values_) values_[k] = v;
}

const std::string &KvConfig::Raw(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) Fail(ErrorCode::kConfig, "missing key '" + key + "'");
  consumed_.insert(key);
  return it->second;
}

std::string KvConfig::GetString(const std::string &key,
                                const std::string &def) const {
  return Has(key) ? Raw(key) : def;
}
std::string KvConfig::GetString(const std::string &key) const { return Raw(key); }

double KvConfig::GetDouble(const std::string &key, double def) const {
  return Has(key) ? ParseDouble(key, Raw(key)) : def;
}
double KvConfig::GetDouble(const std::string &key) const {
  return ParseDouble(key, Raw(key));
}

long KvConfig::GetInt(const std::string &key, long def) const {
  return Has(key) ? GetInt(key) : def;
}
long KvConfig::GetInt(const std::string &key) const {
  const std::string &text = Raw(key);
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    Fail(ErrorCode::kConfig, "key '" + key + "': not an integer: " + text);
  return v;
}

uint64_t KvConfig::GetU64(const std::string &key, uint64_t def) const {
  if (!Has(key)) return def;
  const std::string &text = Raw(key);
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    Fail(ErrorCode::kConfig, "key '" + key + "': not an unsigned integer: " + text);
  return v;
}

bool KvConfig::GetBool(const std::string &key, bool def) const {
  if (!Has(key)) return def;
  const std::string &t = Raw(key);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  Fail(ErrorCode::kConfig, "key '" + key + "': not a boolean: " + t);
}

std::vector<double> KvConfig::GetDoubles(const std::string &key) const {
  std::string text = Raw(key);
  for (char &c : text)
    if (c == ',') c = ' ';
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(ParseDouble(key, tok));
  return out;
}

void KvConfig::CheckAllConsumed() const {
  for (const auto &[k, v] : values_)
    if (!consumed_.count(k)) Fail(ErrorCode::kConfig, "unknown key '" + k + "'");
}

std::string KvConfig::Dump() const {
  std::ostringstream os;
  for (const auto &[k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace aex
