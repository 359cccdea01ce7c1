// pipeline/checks.h

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

#ifndef AEX_PIPELINE_CHECKS_H_
#define AEX_PIPELINE_CHECKS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace aex {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// SI-SNR gain invariance, power doubling, floors and error routing.
std::vector<CheckResult> CheckMetrics(uint64_t seed, int trials = 1000);

/// Analytic loss gradients against central differences in double.
std::vector<CheckResult> CheckGradients(uint64_t seed, size_t coords = 100,
                                        double tolerance = 1e-5);

/// Segmentation and overlap ratio against a per-sample counter.
std::vector<CheckResult> CheckScenarios(uint64_t seed, int trials = 1000);

}  // namespace aex

#endif  // AEX_PIPELINE_CHECKS_H_
