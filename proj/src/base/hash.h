// base/hash.h

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

#ifndef AEX_BASE_HASH_H_
#define AEX_BASE_HASH_H_

#include <string>
#include <string_view>

namespace aex {

std::string Sha1Hex(std::string_view bytes);

/// Content hash in the form git uses for blobs: sha1("blob <len>\0" + data).
std::string GitBlobHash(std::string_view bytes);

/// GitBlobHash of a file's contents; throws kIo if unreadable.
std::string GitBlobHashFile(const std::string &path);

}  // namespace aex

#endif  // AEX_BASE_HASH_H_
