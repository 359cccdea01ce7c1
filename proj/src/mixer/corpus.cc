// mixer/corpus.cc

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

#include "mixer/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "base/error.h"

namespace aex {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Clip counts per slot of the reference conversational corpus (train/val/test).
constexpr std::array<CategoryCounts, kNumSplits> kReferenceCorpus = {{
    {758, 1459, 1578, 2597, 3886, 4229, 5493},
    {158, 329, 412, 634, 1059, 1099, 1309},
    {86, 196, 233, 362, 544, 712, 867},
}};

constexpr std::array<Split, kNumSplits> kSplits = {Split::kTrain, Split::kValidation,
                                                   Split::kTest};

// Placement arithmetic happens on the video-frame grid (640 samples) for
// clip lengths and on samples for boundaries.
struct Interval {
  int64_t start = 0;
  int64_t len = 0;
};

double RatioOf(const Interval &t, const Interval &i) {
  const int64_t lo = std::max(t.start, i.start);
  const int64_t hi = std::min(t.start + t.len, i.start + i.len);
  const int64_t ss = std::max<int64_t>(0, hi - lo);
  return static_cast<double>(ss) / static_cast<double>(t.len + i.len - ss);
}

double Seconds(int64_t samples) { return static_cast<double>(samples) / kSampleRate; }

MixtureSpec SampleSpec(const CorpusConfig &cfg, const std::vector<SyntheticSpeaker> &pool,
                       Split split, int index, int slot) {
  MixtureSpec spec;
  char id[32];
  std::snprintf(id, sizeof(id), "%s_%05d", std::string(SplitName(split)).c_str(), index);
  spec.clip_id = id;
  spec.split = split;
  spec.seed = DeriveSeed({cfg.seed, static_cast<uint64_t>(split) + 1,
                          static_cast<uint64_t>(index)});
  Rng rng(DeriveSeed({spec.seed, 0x51ec}));

  const int64_t min_frames = static_cast<int64_t>(std::ceil(cfg.min_duration_s * kVideoFps - 1e-9));
  const int64_t max_frames = static_cast<int64_t>(std::floor(cfg.max_duration_s * kVideoFps + 1e-9));
  if (max_frames < min_frames || min_frames <= 0)
    Fail(ErrorCode::kUnsatisfiableHistogram, "empty duration range");
  const int64_t n = rng.UniformInt(min_frames, max_frames) * kSamplesPerVideoFrame;
  spec.total_duration_s = Seconds(n);
  spec.snr_db = rng.Uniform(kMinSnrDb, kMaxSnrDb);

  const int64_t a = rng.UniformInt(0, static_cast<int64_t>(pool.size()) - 1);
  int64_t b = rng.UniformInt(0, static_cast<int64_t>(pool.size()) - 2);
  if (b >= a) ++b;
  spec.target.speaker_id = pool[a].speaker_id;
  spec.interferer.speaker_id = pool[b].speaker_id;

  if (slot == 0) {
    const int64_t len = static_cast<int64_t>(n * rng.Uniform(0.5, 1.0));
    const int64_t start = rng.UniformInt(0, n - len);
    spec.interferer.placements = {{Seconds(start), Seconds(len)}};
    return spec;
  }

  const int bucket = slot - 1;
  for (int attempt = 0; attempt < 200; ++attempt) {
    double ratio = 0.0;
    if (bucket == kNumBuckets - 1 && rng.Bernoulli(0.2)) {
      ratio = 1.0;
    } else if (bucket > 0) {
      const double lo = (bucket - 1) / 5.0, hi = bucket / 5.0;
      ratio = rng.Uniform(lo + 0.01, hi - 0.01);
    }
    const int64_t uni = static_cast<int64_t>(n * rng.Uniform(0.6, 1.0));
    const int64_t overlap = static_cast<int64_t>(std::llround(ratio * uni));
    const int64_t rest = uni - overlap;
    const int64_t only_t = static_cast<int64_t>(std::llround(rest * rng.Uniform(0.2, 0.8)));
    const int64_t only_i = rest - only_t;
    const int64_t start = rng.UniformInt(0, n - uni);
    Interval t, i;
    if (rng.Bernoulli(0.5)) {
      t = {start, only_t + overlap};
      i = {start + only_t, only_i + overlap};
    } else {
      i = {start, only_i + overlap};
      t = {start + only_i, only_t + overlap};
    }
    if (t.len <= 0 || i.len <= 0) continue;
    if (Bucket(RatioOf(t, i)) != bucket) continue;
    spec.target.placements = {{Seconds(t.start), Seconds(t.len)}};
    spec.interferer.placements = {{Seconds(i.start), Seconds(i.len)}};
    return spec;
  }
  Fail(ErrorCode::kUnsatisfiableHistogram,
       "cannot place a clip in bucket " + std::string(BucketName(bucket)));
}

std::string MaskRuns(const ActivityMask &mask) {
  std::string out;
  size_t i = 0;
  while (i < mask.size()) {
    if (!mask.values[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < mask.size() && mask.values[j]) ++j;
    if (!out.empty()) out += ';';
    out += std::to_string(i) + ':' + std::to_string(j);
    i = j;
  }
  return out;
}

}  // namespace

CategoryCounts ReferenceCounts(Split split, int total) {
  const auto &row = kReferenceCorpus[static_cast<int>(split)];
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  CategoryCounts out{};
  std::array<std::pair<double, int>, kNumCategorySlots> rem{};
  int assigned = 0;
  for (int s = 0; s < kNumCategorySlots; ++s) {
    const double exact = total * row[s] / sum;
    out[s] = static_cast<int>(std::floor(exact));
    assigned += out[s];
    rem[s] = {exact - out[s], s};
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto &x, const auto &y) { return x.first > y.first; });
  for (int k = 0; assigned < total; ++k, ++assigned) ++out[rem[k].second];
  return out;
}

CorpusConfig CorpusConfig::FromKv(const KvConfig &kv) {
  CorpusConfig cfg;
  cfg.seed = kv.GetU64("seed", 1);
  cfg.num_speakers = static_cast<int>(kv.GetInt("speakers", cfg.num_speakers));
  cfg.speaker_seed = kv.GetU64("speaker_seed", 7);
  cfg.min_duration_s = kv.GetDouble("min_duration_s", cfg.min_duration_s);
  cfg.max_duration_s = kv.GetDouble("max_duration_s", cfg.max_duration_s);
  cfg.visual.dim = static_cast<int>(kv.GetInt("visual_dim", cfg.visual.dim));
  cfg.visual.cue_snr_db = kv.GetDouble("visual_cue_snr_db", cfg.visual.cue_snr_db);
  for (Split split : kSplits) {
    const std::string name(SplitName(split));
    auto &counts = cfg.histogram[static_cast<int>(split)];
    if (kv.Has(name + ".counts")) {
      const auto v = kv.GetDoubles(name + ".counts");
      if (v.size() != kNumCategorySlots)
        Fail(ErrorCode::kConfig, name + ".counts needs " +
                                     std::to_string(kNumCategorySlots) + " values");
      for (int s = 0; s < kNumCategorySlots; ++s) {
        if (v[s] < 0 || v[s] != std::floor(v[s]))
          Fail(ErrorCode::kConfig, name + ".counts must be non-negative integers");
        counts[s] = static_cast<int>(v[s]);
      }
    } else if (kv.Has(name + ".clips")) {
      const long total = kv.GetInt(name + ".clips");
      if (total < 0) Fail(ErrorCode::kConfig, name + ".clips must be non-negative");
      counts = ReferenceCounts(split, static_cast<int>(total));
    }
  }
  return cfg;
}

KvConfig CorpusConfig::ToKv() const {
  KvConfig kv;
  kv.Set("seed", std::to_string(seed));
  kv.Set("speakers", std::to_string(num_speakers));
  kv.Set("speaker_seed", std::to_string(speaker_seed));
  std::ostringstream d;
  d.precision(17);
  d << min_duration_s;
  kv.Set("min_duration_s", d.str());
  d.str("");
  d << max_duration_s;
  kv.Set("max_duration_s", d.str());
  kv.Set("visual_dim", std::to_string(visual.dim));
  d.str("");
  d << visual.cue_snr_db;
  kv.Set("visual_cue_snr_db", d.str());
  for (Split split : kSplits) {
    std::string counts;
    for (int c : histogram[static_cast<int>(split)])
      counts += (counts.empty() ? "" : ",") + std::to_string(c);
    kv.Set(std::string(SplitName(split)) + ".counts", counts);
  }
  return kv;
}

std::vector<MixtureSpec> GenerateSpecs(const CorpusConfig &config) {
  const auto pool = MakeSpeakerPool(config.num_speakers, config.speaker_seed);
  std::vector<MixtureSpec> specs;
  for (Split split : kSplits) {
    const auto &counts = config.histogram[static_cast<int>(split)];
    // Interleave slots so that any prefix of a split is roughly balanced.
    std::vector<int> slots;
    for (int s = 0; s < kNumCategorySlots; ++s) slots.insert(slots.end(), counts[s], s);
    Rng order(DeriveSeed({config.seed, 0x0dde5, static_cast<uint64_t>(split)}));
    for (size_t i = slots.size(); i > 1; --i)
      std::swap(slots[i - 1], slots[order.UniformInt(0, static_cast<int64_t>(i) - 1)]);
    for (size_t i = 0; i < slots.size(); ++i)
      specs.push_back(SampleSpec(config, pool, split, static_cast<int>(i), slots[i]));
  }
  return specs;
}

ManifestEntry MakeEntry(const MixtureClip &clip) {
  ManifestEntry e;
  e.clip_id = clip.spec.clip_id;
  e.mixture_path = "audio/" + e.clip_id + "_mix.wav";
  e.target_path = "audio/" + e.clip_id + "_target.wav";
  e.visual_path = "visual/" + e.clip_id + ".vis";
  e.masks_path = "masks/" + e.clip_id + ".txt";
  e.snr_db = clip.spec.snr_db;
  e.category = clip.category.kind == ClipKind::kTA ? "TA" : "TP";
  e.overlap_ratio = clip.category.kind == ClipKind::kTA ? 0.0 : clip.category.overlap_ratio;
  e.segmentation = ToRunLength(clip.segmentation);
  e.seed = clip.spec.seed;
  e.split = clip.spec.split;
  return e;
}

std::string ManifestToString(const Manifest &manifest) {
  std::string out;
  for (const auto &e : manifest.entries) {
    json j;
    j["clip_id"] = e.clip_id;
    j["paths"] = {{"mixture", e.mixture_path},
                  {"target", e.target_path},
                  {"visual", e.visual_path},
                  {"masks", e.masks_path}};
    j["snr_db"] = e.snr_db;
    j["category"] = e.category;
    j["overlap_ratio"] = e.overlap_ratio;
    j["segmentation"] = e.segmentation;
    j["seed"] = e.seed;
    j["split"] = SplitName(e.split);
    out += j.dump();
    out += '\n';
  }
  return out;
}

Manifest ManifestFromString(const std::string &text, const std::string &base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ManifestEntry e;
      e.clip_id = j.at("clip_id").get<std::string>();
      const auto &p = j.at("paths");
      e.mixture_path = p.at("mixture").get<std::string>();
      e.target_path = p.at("target").get<std::string>();
      e.visual_path = p.at("visual").get<std::string>();
      e.masks_path = p.at("masks").get<std::string>();
      e.snr_db = j.at("snr_db").get<double>();
      e.category = j.at("category").get<std::string>();
      if (e.category != "TA" && e.category != "TP")
        Fail(ErrorCode::kFormat, "category must be TA or TP");
      e.overlap_ratio = j.at("overlap_ratio").get<double>();
      e.segmentation = j.at("segmentation").get<std::string>();
      e.seed = j.at("seed").get<uint64_t>();
      e.split = ParseSplit(j.at("split").get<std::string>());
      m.entries.push_back(std::move(e));
    } catch (const json::exception &ex) {
      Fail(ErrorCode::kFormat, "manifest line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return m;
}

void SaveManifest(const std::string &path, const Manifest &manifest) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path);
  os << ManifestToString(manifest);
}

Manifest LoadManifest(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ManifestFromString(ss.str(), fs::path(path).parent_path().string());
}

Manifest GenerateCorpus(const CorpusConfig &config, const std::string &out_dir) {
  const auto pool = MakeSpeakerPool(config.num_speakers, config.speaker_seed);
  const fs::path root(out_dir);
  for (const char *sub : {"audio", "visual", "masks"}) fs::create_directories(root / sub);
  Manifest manifest;
  manifest.base_dir = out_dir;
  for (const auto &spec : GenerateSpecs(config)) {
    const MixtureClip clip = BuildClip(spec, pool, config.visual);
    ManifestEntry e = MakeEntry(clip);
    size_t clipped = WriteWav((root / e.mixture_path).string(), clip.mixture);
    clipped += WriteWav((root / e.target_path).string(), clip.target_clean);
    if (clipped > 0)
      std::fprintf(stderr, "warning: %s: %zu samples clipped on write\n",
                   e.clip_id.c_str(), clipped);
    WriteVisual((root / e.visual_path).string(), clip.target_visual);
    std::ofstream masks(root / e.masks_path);
    masks << "target " << MaskRuns(clip.target_mask) << "\n"
          << "interference " << MaskRuns(clip.interference_mask) << "\n";
    manifest.entries.push_back(std::move(e));
  }
  SaveManifest((root / "manifest.jsonl").string(), manifest);
  std::ofstream cfg(root / "corpus.conf");
  cfg << config.ToKv().Dump();
  return manifest;
}

ClipData ToClipData(const MixtureClip &clip) {
  ClipData d;
  d.clip_id = clip.spec.clip_id;
  d.split = clip.spec.split;
  d.mixture = clip.mixture;
  d.target = clip.target_clean;
  d.visual = clip.target_visual;
  d.segmentation = clip.segmentation;
  d.category = clip.category;
  d.target_mask = clip.target_mask;
  return d;
}

ClipData LoadClip(const Manifest &manifest, const ManifestEntry &e) {
  const fs::path root(manifest.base_dir);
  ClipData d;
  d.clip_id = e.clip_id;
  d.split = e.split;
  d.mixture = ReadWav((root / e.mixture_path).string());
  d.target = ReadWav((root / e.target_path).string());
  d.visual = ReadVisual((root / e.visual_path).string());
  d.segmentation = FromRunLength(e.segmentation);
  Require(d.segmentation.size() == d.mixture.size() && d.target.size() == d.mixture.size(),
          ErrorCode::kLengthMismatch, e.clip_id + ": manifest and audio lengths disagree");
  d.target_mask.values.resize(d.mixture.size());
  for (size_t i = 0; i < d.segmentation.size(); ++i)
    d.target_mask.values[i] = TargetSpeaking(d.segmentation.labels[i]) ? 1 : 0;
  d.category = {e.category == "TA" ? ClipKind::kTA : ClipKind::kTP, e.overlap_ratio};
  return d;
}

MixtureSpec DynamicMixer::NextSpec() {
  MixtureSpec spec;
  spec.clip_id = "dyn_" + std::to_string(counter_++);
  spec.total_duration_s = kClipSeconds;
  spec.seed = rng_.NextU64();
  spec.snr_db = rng_.Uniform(kMinSnrDb, kMaxSnrDb);
  const int64_t a = rng_.UniformInt(0, static_cast<int64_t>(pool_.size()) - 1);
  int64_t b = rng_.UniformInt(0, static_cast<int64_t>(pool_.size()) - 2);
  if (b >= a) ++b;
  spec.target = {pool_[a].speaker_id, {{0.0, kClipSeconds}}};
  spec.interferer = {pool_[b].speaker_id, {{0.0, kClipSeconds}}};
  return spec;
}

std::vector<MixtureClip> DynamicMixer::Next(int batch_size) {
  std::vector<MixtureClip> out;
  out.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) out.push_back(BuildClip(NextSpec(), pool_, visual_));
  return out;
}

std::array<SplitStats, kNumSplits> ComputeStats(const Manifest &manifest) {
  std::array<SplitStats, kNumSplits> stats{};
  for (const auto &e : manifest.entries) {
    auto &s = stats[static_cast<int>(e.split)];
    ++s.total;
    const ClipCategory cat{e.category == "TA" ? ClipKind::kTA : ClipKind::kTP,
                           e.overlap_ratio};
    ++s.counts[CategorySlot(cat)];
    const auto seg = FromRunLength(e.segmentation);
    for (int k = 0; k < kNumScenarios; ++k) s.hours[k] += seg.durations[k] / 3600.0;
  }
  return stats;
}

std::string RenderStats(const std::array<SplitStats, kNumSplits> &stats) {
  std::ostringstream os;
  os << "Data\tTotal Clips";
  for (int s = 0; s < kNumCategorySlots; ++s) os << '\t' << CategorySlotName(s);
  for (int k = 0; k < kNumScenarios; ++k)
    os << '\t' << ScenarioName(static_cast<Scenario>(k)) << " (h)";
  os << '\n';
  for (Split split : kSplits) {
    const auto &s = stats[static_cast<int>(split)];
    os << SplitName(split) << '\t' << s.total;
    for (int c : s.counts) os << '\t' << c;
    char buf[32];
    for (double h : s.hours) {
      std::snprintf(buf, sizeof(buf), "\t%.4f", h);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace aex
