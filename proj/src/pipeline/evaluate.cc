// pipeline/evaluate.cc

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

#include "pipeline/evaluate.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "base/error.h"
#include "base/random.h"
#include "signal/metrics.h"

namespace aex {

EvalReport EvaluateClips(const SystemFn &fn, const std::vector<ClipData> &clips,
                         const std::string &model_tag, const std::string &dataset_tag) {
  Require(!clips.empty(), ErrorCode::kEmptyManifest, "evaluate: no clips");
  EvalReport r;
  r.model_tag = model_tag;
  r.dataset_tag = dataset_tag;
  double ta_sum = 0.0, tp_sum = 0.0;
  std::array<double, kNumBuckets> sums{};
  for (const auto &clip : clips) {
    const Waveform est = fn(clip);
    Require(est.size() == clip.mixture.size(), ErrorCode::kLengthMismatch,
            "evaluate: estimate length differs for " + clip.clip_id);
    if (clip.category.kind == ClipKind::kTA) {
      ta_sum += Power(est).value;
      ++r.ta_count;
    } else {
      const double v = SiSnr(est, clip.target).value;
      const int b = Bucket(clip.category.overlap_ratio);
      sums[b] += v;
      ++r.tp_si_snr_by_bucket[b].count;
      tp_sum += v;
      ++r.tp_count;
    }
  }
  r.ta_power_db = r.ta_count ? ta_sum / r.ta_count : std::nan("");
  r.tp_avg_db = r.tp_count ? tp_sum / r.tp_count : std::nan("");
  for (int b = 0; b < kNumBuckets; ++b) {
    auto &s = r.tp_si_snr_by_bucket[b];
    s.mean_db = s.count ? sums[b] / s.count : std::nan("");
  }
  return r;
}

std::vector<ClipData> LoadSplit(const Manifest &manifest, Split split) {
  std::vector<ClipData> clips;
  for (const auto &e : manifest.entries)
    if (e.split == split) clips.push_back(LoadClip(manifest, e));
  Require(!clips.empty(), ErrorCode::kEmptyManifest,
          "manifest has no " + std::string(SplitName(split)) + " clips");
  return clips;
}

std::vector<EvalReport> Evaluate(const TseSystem &system, const Manifest &manifest,
                                 const std::string &model_tag, Split split) {
  const auto clips = LoadSplit(manifest, split);
  const std::string dataset = manifest.base_dir + ":" + std::string(SplitName(split));
  return {EvaluateClips([](const ClipData &c) { return c.mixture; }, clips, "Mixture", dataset),
          EvaluateClips([&](const ClipData &c) { return system.Extract(c.mixture, c.visual); },
                        clips, model_tag, dataset)};
}

EvalReport EvaluateCorruptedGate(const TseSystem &system, const std::vector<ClipData> &clips,
                                 double flip_fraction, uint64_t seed,
                                 const std::string &model_tag, const std::string &dataset_tag) {
  Require(system.config().kind == SystemKind::kGatedBaseline, ErrorCode::kConfig,
          "gate corruption applies to the gated baseline");
  Require(flip_fraction >= 0.0 && flip_fraction <= 1.0, ErrorCode::kConfig,
          "flip fraction must lie in [0, 1]");
  std::vector<size_t> order(clips.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.UniformInt(0, static_cast<int64_t>(i) - 1)]);
  const auto flips = static_cast<size_t>(std::lround(flip_fraction * clips.size()));
  std::set<std::string> flipped;
  for (size_t i = 0; i < flips; ++i) flipped.insert(clips[order[i]].clip_id);
  return EvaluateClips(
      [&](const ClipData &c) {
        const bool gate = system.GateDecision(c.mixture, c.visual) != (flipped.count(c.clip_id) > 0);
        return system.ExtractWithGate(c.mixture, c.visual, gate);
      },
      clips, model_tag, dataset_tag);
}

ReportFormat ParseReportFormat(const std::string &name) {
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  Fail(ErrorCode::kConfig, "unknown report format '" + name + "'");
}

namespace {

std::string Cell(double v, int count) {
  if (count == 0 || !std::isfinite(v)) return "—";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string RenderReport(const std::vector<EvalReport> &reports, ReportFormat format) {
  std::vector<std::string> header = {"System", "TA Power ↓"};
  for (int b = 0; b < kNumBuckets; ++b) header.emplace_back(BucketName(b));
  header.push_back("Avg.");

  std::vector<std::vector<std::string>> rows;
  for (const auto &r : reports) {
    std::vector<std::string> row = {r.model_tag, Cell(r.ta_power_db, r.ta_count)};
    for (const auto &b : r.tp_si_snr_by_bucket) row.push_back(Cell(b.mean_db, b.count));
    row.push_back(Cell(r.tp_avg_db, r.tp_count));
    rows.push_back(std::move(row));
  }

  std::ostringstream os;
  auto emit = [&](const std::vector<std::string> &cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (format == ReportFormat::kMarkdown) {
        os << "| " << cells[i] << " ";
      } else {
        os << (i ? "\t" : "") << cells[i];
      }
    }
    os << (format == ReportFormat::kMarkdown ? "|\n" : "\n");
  };
  emit(header);
  if (format == ReportFormat::kMarkdown) {
    os << "|---";
    for (size_t i = 1; i < header.size(); ++i) os << "|---:";
    os << "|\n";
  }
  for (const auto &row : rows) emit(row);
  if (format == ReportFormat::kMarkdown && !reports.empty()) {
    const auto &r = reports.front();
    os << "\nTA Power in dB (lower is better); SI-SNR in dB per overlap bucket. "
       << "Avg. is the mean over all TP clips, not the mean of bucket means. "
       << "Dataset: " << r.dataset_tag << ", TA clips: " << r.ta_count
       << ", TP clips: " << r.tp_count << ".\n";
  }
  return os.str();
}

}  // namespace aex
