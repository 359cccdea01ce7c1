// pipeline/evaluate.h

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

#ifndef AEX_PIPELINE_EVALUATE_H_
#define AEX_PIPELINE_EVALUATE_H_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mixer/corpus.h"
#include "separator/systems.h"

namespace aex {

struct BucketStat {
  double mean_db = 0.0;
  int count = 0;
};

struct EvalReport {
  std::string model_tag;
  std::string dataset_tag;
  double ta_power_db = 0.0;  // NaN without TA clips
  int ta_count = 0;
  std::array<BucketStat, kNumBuckets> tp_si_snr_by_bucket{};
  double tp_avg_db = 0.0;  // mean over all TP clips; NaN without TP clips
  int tp_count = 0;
};

/// Maps a clip to the system's estimate.
using SystemFn = std::function<Waveform(const ClipData &)>;

/// Scores `fn` on every clip: TA clips by Power, TP clips by SI-SNR against
/// the clean target. Throws kEmptyManifest on an empty clip list.
EvalReport EvaluateClips(const SystemFn &fn, const std::vector<ClipData> &clips,
                         const std::string &model_tag, const std::string &dataset_tag);

/// The unprocessed-mixture row followed by the system's row, on the
/// clips of `split`.
std::vector<EvalReport> Evaluate(const TseSystem &system, const Manifest &manifest,
                                 const std::string &model_tag, Split split = Split::kTest);

/// Gated-baseline scoring with a fraction of clip-level gate decisions
/// flipped (chosen uniformly without replacement).
EvalReport EvaluateCorruptedGate(const TseSystem &system, const std::vector<ClipData> &clips,
                                 double flip_fraction, uint64_t seed,
                                 const std::string &model_tag, const std::string &dataset_tag);

std::vector<ClipData> LoadSplit(const Manifest &manifest, Split split);

enum class ReportFormat { kTsv, kMarkdown };
ReportFormat ParseReportFormat(const std::string &name);

/// One row per report. Columns: TA Power, the six overlap buckets and Avg.;
/// empty cells render as an em dash, dB values with two decimals.
std::string RenderReport(const std::vector<EvalReport> &reports, ReportFormat format);

}  // namespace aex

#endif  // AEX_PIPELINE_EVALUATE_H_
