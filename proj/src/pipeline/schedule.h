// pipeline/schedule.h

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

#ifndef AEX_PIPELINE_SCHEDULE_H_
#define AEX_PIPELINE_SCHEDULE_H_

namespace aex {

/// Validation-driven learning-rate plateau rule. After each epoch the
/// validation loss is observed; the rate halves every `halve_patience`
/// epochs without a new best and training stops after `stop_patience`.
class PlateauSchedule {
 public:
  PlateauSchedule(double lr_init, int halve_patience = 3, int stop_patience = 10);

  struct Decision {
    bool improved = false;
    bool halved = false;
    bool stop = false;
    double lr = 0.0;  // rate for the next epoch
  };
  Decision Observe(double validation_loss);

  double lr() const { return lr_; }
  double best() const { return best_; }
  int stagnant_epochs() const { return stagnant_; }
  int epochs() const { return epochs_; }

 private:
  double lr_;
  int halve_patience_, stop_patience_;
  double best_;
  int stagnant_ = 0;
  int epochs_ = 0;
};

}  // namespace aex

#endif  // AEX_PIPELINE_SCHEDULE_H_
