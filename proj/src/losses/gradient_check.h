// losses/gradient_check.h

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

#ifndef AEX_LOSSES_GRADIENT_CHECK_H_
#define AEX_LOSSES_GRADIENT_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace aex {

/// Returns the loss at x and writes d loss / d x into `grad`.
using DifferentiableFn =
    std::function<double(std::span<const double> x, std::vector<double> *grad)>;

struct GradientCheckResult {
  double max_relative_error = 0.0;
  size_t coordinates = 0;
  size_t worst_index = 0;
};

/// Central finite differences against the analytic gradient on up to
/// `sample_coords` randomly chosen coordinates (all when x is smaller).
/// Relative error is |a - n| / max(|a|, |n|, floor) with floor = 1e-8.
/// Throws kNonFiniteGradient if either gradient is not finite.
GradientCheckResult GradientCheck(const DifferentiableFn &fn, std::vector<double> x,
                                  double h = 1e-4, size_t sample_coords = 100,
                                  uint64_t seed = 0);

}  // namespace aex

#endif  // AEX_LOSSES_GRADIENT_CHECK_H_
