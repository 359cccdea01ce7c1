// tests/unit/pipeline_test.cc

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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "base/error.h"
#include "mixer/corpus.h"
#include "pipeline/evaluate.h"
#include "signal/metrics.h"
#include "pipeline/experiment.h"
#include "pipeline/schedule.h"
#include "pipeline/train.h"

using namespace aex;
namespace fs = std::filesystem;

namespace {

// Replays a validation history; returns (epochs after which the rate
// halved, epoch at which training stopped or 0).
std::pair<std::vector<int>, int> Replay(const std::vector<double> &losses) {
  PlateauSchedule s(1e-4);
  std::vector<int> halved;
  for (size_t i = 0; i < losses.size(); ++i) {
    const auto d = s.Observe(losses[i]);
    if (d.halved) halved.push_back(static_cast<int>(i + 1));
    if (d.stop) return {halved, static_cast<int>(i + 1)};
  }
  return {halved, 0};
}

ClipData SyntheticClip(const std::string &id, bool target_present, double ratio_hint) {
  static const auto pool = MakeSpeakerPool(4, 1);
  MixtureSpec spec;
  spec.clip_id = id;
  spec.target = {"spk00", {}};
  if (target_present) spec.target.placements = {{0.0, 2.0}};
  spec.interferer = {"spk01", {{2.0 - ratio_hint, 1.0 + ratio_hint}}};
  spec.total_duration_s = 3.0;
  spec.seed = std::hash<std::string>{}(id);
  return ToClipData(BuildClip(spec, pool));
}

}  // namespace

TEST_CASE("constant validation loss halves after three stagnant epochs") {
  const auto [halved, stop] = Replay(std::vector<double>(20, 5.0));
  REQUIRE(!halved.empty());
  CHECK(halved[0] == 4);
  CHECK(halved == std::vector<int>{4, 7, 10});
  CHECK(stop == 11);
}

TEST_CASE("improvement resets both counters") {
  PlateauSchedule s(1.0);
  s.Observe(5);
  s.Observe(5);
  s.Observe(5);
  CHECK(s.Observe(4).improved);
  CHECK(s.stagnant_epochs() == 0);
  s.Observe(4);
  s.Observe(4.5);
  const auto d = s.Observe(4);
  CHECK(d.halved);
  CHECK(d.lr == 0.5);
  const auto [halved, stop] = Replay({3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0.5});
  CHECK(halved == std::vector<int>{6, 9, 12});
  CHECK(stop == 13);
}

TEST_CASE("schedule rejects non-finite losses") {
  PlateauSchedule s(1e-4);
  CHECK_THROWS_AS(s.Observe(std::nan("")), Error);
}

TEST_CASE("training config invariants") {
  auto kv = KvConfig::FromString("stage = overlap_pretrain\nloss = sadl_b\n");
  CHECK_THROWS_AS(TrainConfig::FromKv(kv), Error);
  kv = KvConfig::FromString("stage = sparse_finetune\nloss = sdr\n");
  CHECK_THROWS_AS(TrainConfig::FromKv(kv), Error);
  kv = KvConfig::FromString(
      "stage = sparse_finetune\nloss = sdr\nmodel.kind = gated_baseline\ndata.tp_only = true\n");
  CHECK(TrainConfig::FromKv(kv).loss.kind == LossKind::kSdr);
  CHECK(TrainConfig::FromKv(KvConfig::FromString("stage = sparse_finetune\n")).max_epochs == 30);
  const auto pre = TrainConfig::FromKv(KvConfig::FromString("stage = overlap_pretrain\n"));
  CHECK(pre.max_epochs == 100);
  CHECK(pre.lr_init == 1e-4);
  CHECK(pre.halve_patience == 3);
  CHECK(pre.stop_patience == 10);
  const auto back = TrainConfig::FromKv(pre.ToKv());
  CHECK(back.ToKv().Dump() == pre.ToKv().Dump());
}

TEST_CASE("stage gating") {
  const auto dir = fs::temp_directory_path() / "aex_gating";
  fs::remove_all(dir);
  auto cfg = TrainConfig::FromKv(KvConfig::FromString(
      "stage = sparse_finetune\nloss = sadl_b\nout_dir = " + dir.string() + "\n"));
  std::vector<Example> val = {MakeExample(SyntheticClip("v", true, 0.5))};
  const EpochSource none = [&](int) { return std::vector<const Example *>{&val[0]}; };
  try {
    TrainOn(cfg, none, val);
    FAIL("expected MissingPrerequisiteCheckpoint");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kMissingPrerequisiteCheckpoint);
  }
  cfg.init = (dir / "missing.ckpt").string();
  CHECK_THROWS_AS(TrainOn(cfg, none, val), Error);
  // An ASD checkpoint is the wrong prerequisite for finetuning.
  fs::create_directories(dir);
  AsdModel(AsdConfig{}).Save((dir / "asd.ckpt").string());
  cfg.init = (dir / "asd.ckpt").string();
  try {
    TrainOn(cfg, none, val);
    FAIL("expected MissingPrerequisiteCheckpoint");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kMissingPrerequisiteCheckpoint);
  }
  auto pre = TrainConfig::FromKv(KvConfig::FromString(
      "stage = overlap_pretrain\ndata.dynamic_mix = true\nout_dir = " + dir.string() + "\n"));
  CHECK_THROWS_AS(TrainOn(pre, none, val), Error);
  fs::remove_all(dir);
}

TEST_CASE("tiny training runs are deterministic") {
  const auto dir = fs::temp_directory_path() / "aex_det";
  fs::remove_all(dir);
  std::vector<Example> data;
  for (int i = 0; i < 4; ++i)
    data.push_back(MakeExample(SyntheticClip("c" + std::to_string(i), i != 0, 0.3 + 0.1 * i)));
  const EpochSource source = [&](int) {
    std::vector<const Example *> out;
    for (const auto &e : data) out.push_back(&e);
    return out;
  };
  auto run = [&](const std::string &sub) {
    auto asd = TrainConfig::FromKv(KvConfig::FromString(
        "stage = asd_pretrain\nmax_epochs = 1\nbatch_size = 2\nout_dir = " +
        (dir / sub).string() + "\n"));
    const auto a = TrainOn(asd, source, data);
    auto pre = TrainConfig::FromKv(KvConfig::FromString(
        "stage = overlap_pretrain\ndata.tp_only = true\nmax_epochs = 1\nbatch_size = 2\n"
        "init = " + a.checkpoint + "\nout_dir = " + (dir / sub).string() + "\n"));
    std::vector<Example> tp(data.begin() + 1, data.end());
    const EpochSource tp_source = [&](int) {
      std::vector<const Example *> out;
      for (const auto &e : tp) out.push_back(&e);
      return out;
    };
    const auto b = TrainOn(pre, tp_source, tp);
    auto fine = TrainConfig::FromKv(KvConfig::FromString(
        "stage = sparse_finetune\nloss = sadl_b\nmax_epochs = 2\nbatch_size = 2\ninit = " +
        b.checkpoint + "\nout_dir = " + (dir / sub).string() + "\n"));
    const auto c = TrainOn(fine, source, data);
    CHECK(fs::exists(dir / sub / "sparse_finetune.conf"));
    CHECK(fs::exists(dir / sub / "sparse_finetune.card.txt"));
    CHECK(CheckpointStage(c.checkpoint) == "sparse_finetune");
    return c.best_validation_loss;
  };
  CHECK(run("a") == run("b"));
  fs::remove_all(dir);
}

TEST_CASE("evaluation of reference systems") {
  std::vector<ClipData> clips = {SyntheticClip("ta", false, 0.5), SyntheticClip("tp1", true, 0.5),
                                 SyntheticClip("tp2", true, 1.0)};
  const auto zero = EvaluateClips([](const ClipData &c) { return Waveform::Zeros(c.mixture.size()); },
                                  clips, "zero", "unit");
  CHECK(zero.ta_power_db == -80.0);
  CHECK(zero.tp_avg_db == -60.0);
  CHECK(zero.ta_count == 1);
  CHECK(zero.tp_count == 2);

  const auto mix = EvaluateClips([](const ClipData &c) { return c.mixture; }, clips, "id", "unit");
  double sum = 0.0, weighted = 0.0;
  int count = 0;
  for (const auto &c : clips) {
    if (c.category.kind == ClipKind::kTA) continue;
    sum += SiSnr(c.mixture, c.target).value;
  }
  for (const auto &b : mix.tp_si_snr_by_bucket) {
    count += b.count;
    if (b.count) weighted += b.mean_db * b.count;
  }
  CHECK(count == mix.tp_count);
  CHECK(mix.tp_avg_db == doctest::Approx(sum / 2).epsilon(1e-12));
  CHECK(std::abs(weighted / count - mix.tp_avg_db) < 1e-9);
  CHECK_THROWS_AS(EvaluateClips([](const ClipData &c) { return c.mixture; }, {}, "x", "y"),
                  Error);
}

TEST_CASE("report rendering") {
  EvalReport r;
  r.model_tag = "sys";
  r.dataset_tag = "unit";
  r.ta_power_db = -12.3456;
  r.ta_count = 3;
  r.tp_si_snr_by_bucket[1] = {4.5, 2};
  r.tp_avg_db = 4.5;
  r.tp_count = 2;
  const auto md = RenderReport({r}, ReportFormat::kMarkdown);
  CHECK(md.find("| TA Power ↓ | 0% | (0,20]% | (20,40]% | (40,60]% | (60,80]% | (80,100]% | Avg. |") !=
        std::string::npos);
  CHECK(md.find("| sys | -12.35 | — | 4.50 | — | — | — | — | 4.50 |") != std::string::npos);
  const auto tsv = RenderReport({r}, ReportFormat::kTsv);
  CHECK(tsv.find("sys\t-12.35\t—\t4.50") != std::string::npos);
  // Eight numeric columns per system row.
  const auto row = tsv.substr(tsv.find("sys"));
  CHECK(std::count(row.begin(), row.end(), '\t') == 8);
}

TEST_CASE("sub-config extraction") {
  const auto kv = KvConfig::FromString("a.x = 1\na.y = 2\nb.x = 3\n");
  const auto a = SubConfig(kv, "a.");
  CHECK(a.values().size() == 2);
  CHECK(a.GetInt("x") == 1);
}

TEST_CASE("experiments are reproducible end to end") {
  const auto dir = fs::temp_directory_path() / "aex_experiment";
  fs::remove_all(dir);
  auto recipe = [&](const std::string &name) {
    return KvConfig::FromString(
        "name = det\nout_dir = " + (dir / name).string() + "\nseed = 3\n"
        "corpus.dir = " + (dir / "corpus").string() + "\n"
        "corpus.train.counts = 1,1,0,1,0,1,0\ncorpus.validation.counts = 1,0,0,1,0,0,0\n"
        "corpus.test.counts = 1,1,0,0,1,0,0\ncorpus.max_duration_s = 4\n"
        "model.preset = toy\nasd_pretrain.max_epochs = 1\n"
        "overlap_pretrain.max_epochs = 1\noverlap_pretrain.data.clips_per_epoch = 2\n"
        "overlap_pretrain.data.validation_clips = 1\n"
        "sparse_finetune.max_epochs = 1\nsparse_finetune.loss = sadl_b\n");
  };
  const auto a = RunExperiment(recipe("a"));
  const auto b = RunExperiment(recipe("b"));
  REQUIRE(a.reports.size() == 2);
  CHECK(RenderReport(a.reports, ReportFormat::kTsv) == RenderReport(b.reports, ReportFormat::kTsv));
  CHECK(a.checkpoints.size() == 3);
  CHECK(fs::exists(dir / "a" / "report.md"));
  CHECK(fs::exists(a.provenance_path));
  auto bad = recipe("c");
  bad.Set("unknown_key", "1");
  CHECK_THROWS_AS(RunExperiment(bad), Error);
  fs::remove_all(dir);
}
