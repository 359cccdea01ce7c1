// base/kv_config.h

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

#ifndef AEX_BASE_KV_CONFIG_H_
#define AEX_BASE_KV_CONFIG_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aex {

/// Plain-text configuration: one `key = value` pair per line, `#` starts a
/// comment. Every getter records the key as consumed so that typos can be
/// reported with CheckAllConsumed(). All parse failures throw kConfig.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig FromString(const std::string &text);
  static KvConfig FromFile(const std::string &path);

  bool Has(const std::string &key) const { return values_.count(key) != 0; }
  void Set(const std::string &key, const std::string &value) {
    values_[key] = value;
  }
  /// Entries of `other` override entries here.
  void Merge(const KvConfig &other);

  std::string GetString(const std::string &key, const std::string &def) const;
  std::string GetString(const std::string &key) const;
  double GetDouble(const std::string &key, double def) const;
  double GetDouble(const std::string &key) const;
  long GetInt(const std::string &key, long def) const;
  long GetInt(const std::string &key) const;
  /// Unsigned 64-bit values such as seeds.
  uint64_t GetU64(const std::string &key, uint64_t def) const;
  bool GetBool(const std::string &key, bool def) const;
  std::vector<double> GetDoubles(const std::string &key) const;

  void CheckAllConsumed() const;

  /// Canonical text form, keys sorted.
  std::string Dump() const;

  const std::map<std::string, std::string> &values() const { return values_; }

 private:
  const std::string &Raw(const std::string &key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

}  // namespace aex

#endif  // AEX_BASE_KV_CONFIG_H_
