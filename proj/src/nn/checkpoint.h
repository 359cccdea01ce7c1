// nn/checkpoint.h

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

#ifndef AEX_NN_CHECKPOINT_H_
#define AEX_NN_CHECKPOINT_H_

#include <map>
#include <string>
#include <vector>

#include "nn/layers.h"

namespace aex::nn {

/// On-disk layout: the magic line, a u64-prefixed JSON metadata string, a
/// u32 section count, then per section a u32-prefixed name and a
/// u64-prefixed ParamStore blob.
struct Checkpoint {
  std::string metadata;  // JSON text
  std::map<std::string, std::string> sections;

  void Add(const std::string &name, const ParamStore &store);
  bool Has(const std::string &name) const { return sections.count(name) != 0; }
  /// Loads a section into `store`; names and shapes must match.
  void Restore(const std::string &name, ParamStore &store) const;

  void Save(const std::string &path) const;
  static Checkpoint Load(const std::string &path);
};

}  // namespace aex::nn

#endif  // AEX_NN_CHECKPOINT_H_
