// pipeline/schedule.cc

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

#include "pipeline/schedule.h"

#include <cmath>
#include <limits>

#include "base/error.h"

namespace aex {

PlateauSchedule::PlateauSchedule(double lr_init, int halve_patience, int stop_patience)
    : lr_(lr_init),
      halve_patience_(halve_patience),
      stop_patience_(stop_patience),
      best_(std::numeric_limits<double>::infinity()) {
  Require(lr_init > 0.0 && halve_patience > 0 && stop_patience > 0, ErrorCode::kConfig,
          "schedule needs a positive rate and patiences");
}

PlateauSchedule::Decision PlateauSchedule::Observe(double validation_loss) {
  Require(std::isfinite(validation_loss), ErrorCode::kDivergedLoss,
          "validation loss is not finite");
  ++epochs_;
  Decision d;
  if (validation_loss < best_) {
    best_ = validation_loss;
    stagnant_ = 0;
    d.improved = true;
  } else {
    ++stagnant_;
    if (stagnant_ % halve_patience_ == 0) {
      lr_ *= 0.5;
      d.halved = true;
    }
    d.stop = stagnant_ >= stop_patience_;
  }
  d.lr = lr_;
  return d;
}

}  // namespace aex
