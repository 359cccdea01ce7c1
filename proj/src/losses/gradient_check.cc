// losses/gradient_check.cc

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

#include "losses/gradient_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "base/error.h"
#include "base/random.h"

namespace aex {

GradientCheckResult GradientCheck(const DifferentiableFn &fn, std::vector<double> x,
                                  double h, size_t sample_coords, uint64_t seed) {
  std::vector<double> analytic;
  fn(x, &analytic);
  Require(analytic.size() == x.size(), ErrorCode::kShapeMismatch,
          "gradient has wrong length");

  std::vector<size_t> coords(x.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (coords.size() > sample_coords) {
    Rng rng(seed);
    for (size_t i = 0; i < sample_coords; ++i)
      std::swap(coords[i], coords[rng.UniformInt(static_cast<int64_t>(i),
                                                 static_cast<int64_t>(coords.size()) - 1)]);
    coords.resize(sample_coords);
  }

  GradientCheckResult res;
  for (size_t idx : coords) {
    const double saved = x[idx];
    x[idx] = saved + h;
    const double up = fn(x, nullptr);
    x[idx] = saved - h;
    const double down = fn(x, nullptr);
    x[idx] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[idx];
    if (!std::isfinite(a) || !std::isfinite(numeric))
      Fail(ErrorCode::kNonFiniteGradient,
           "non-finite gradient at coordinate " + std::to_string(idx));
    const double rel =
        std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
    if (rel > res.max_relative_error) {
      res.max_relative_error = rel;
      res.worst_index = idx;
    }
    ++res.coordinates;
  }
  return res;
}

}  // namespace aex
