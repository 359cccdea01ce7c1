// mixer/corpus.h

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

#ifndef AEX_MIXER_CORPUS_H_
#define AEX_MIXER_CORPUS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "base/kv_config.h"
#include "base/random.h"
#include "mixer/clip.h"

namespace aex {

inline constexpr int kNumSplits = 3;
using CategoryCounts = std::array<int, kNumCategorySlots>;

/// Reference-corpus proportions (TA, 0%, (0,20], ..., (80,100]) scaled to `total`
/// clips by largest-remainder rounding.
CategoryCounts ReferenceCounts(Split split, int total);

struct CorpusConfig {
  uint64_t seed = 1;
  int num_speakers = 10;
  uint64_t speaker_seed = 7;
  double min_duration_s = 3.0;
  double max_duration_s = 6.0;
  std::array<CategoryCounts, kNumSplits> histogram{};
  VisualConfig visual;

  /// Keys: seed, speakers, speaker_seed, min_duration_s, max_duration_s,
  /// visual_dim, visual_cue_snr_db, and per split either `<split>.clips = N`
  /// (reference-corpus proportions) or `<split>.counts = ta,b0,b1,b2,b3,b4,b5`.
  static CorpusConfig FromKv(const KvConfig &kv);
  KvConfig ToKv() const;
};

/// One clip spec per requested histogram slot; the realised category of each
/// spec is guaranteed to fall in its slot. Throws kUnsatisfiableHistogram
/// when the duration limits cannot host a slot.
std::vector<MixtureSpec> GenerateSpecs(const CorpusConfig &config);

struct ManifestEntry {
  std::string clip_id;
  std::string mixture_path;
  std::string target_path;
  std::string visual_path;
  std::string masks_path;
  double snr_db = 0.0;
  std::string category;  // "TA" or "TP"
  double overlap_ratio = 0.0;
  std::string segmentation;  // run-length form
  uint64_t seed = 0;
  Split split = Split::kTrain;
  bool operator==(const ManifestEntry &) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string base_dir;  // paths in entries are relative to this
  bool operator==(const Manifest &o) const { return entries == o.entries; }
};

std::string ManifestToString(const Manifest &manifest);
Manifest ManifestFromString(const std::string &text, const std::string &base_dir = ".");
void SaveManifest(const std::string &path, const Manifest &manifest);
Manifest LoadManifest(const std::string &path);

ManifestEntry MakeEntry(const MixtureClip &clip);

/// Writes <out_dir>/audio/*.wav, visual/*.vis, masks/*.txt and
/// <out_dir>/manifest.jsonl. Returns the manifest.
Manifest GenerateCorpus(const CorpusConfig &config, const std::string &out_dir);

/// Everything training and evaluation need from one clip.
struct ClipData {
  std::string clip_id;
  Split split = Split::kTrain;
  Waveform mixture;
  Waveform target;
  VisualStream visual;
  ScenarioSegmentation segmentation;
  ClipCategory category;
  ActivityMask target_mask;
};

ClipData ToClipData(const MixtureClip &clip);
ClipData LoadClip(const Manifest &manifest, const ManifestEntry &entry);

/// Fully overlapped 4 s mixtures with fresh random specs per call.
class DynamicMixer {
 public:
  static constexpr double kClipSeconds = 4.0;

  DynamicMixer(std::vector<SyntheticSpeaker> pool, uint64_t seed, VisualConfig visual = {})
      : pool_(std::move(pool)), rng_(seed), visual_(visual) {}

  MixtureSpec NextSpec();
  std::vector<MixtureClip> Next(int batch_size);

 private:
  std::vector<SyntheticSpeaker> pool_;
  Rng rng_;
  VisualConfig visual_;
  uint64_t counter_ = 0;
};

struct SplitStats {
  int total = 0;
  CategoryCounts counts{};
  std::array<double, kNumScenarios> hours{};
};

std::array<SplitStats, kNumSplits> ComputeStats(const Manifest &manifest);
/// Text table laid out like the corpus summary: one row per split.
std::string RenderStats(const std::array<SplitStats, kNumSplits> &stats);

}  // namespace aex

#endif  // AEX_MIXER_CORPUS_H_
