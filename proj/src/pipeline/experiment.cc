// pipeline/experiment.cc

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

#include "pipeline/experiment.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "base/error.h"
#include "base/hash.h"
#include "json.hpp"

namespace aex {

namespace fs = std::filesystem;

KvConfig SubConfig(const KvConfig &kv, const std::string &prefix) {
  KvConfig out;
  for (const auto &[k, v] : kv.values())
    if (k.rfind(prefix, 0) == 0) out.Set(k.substr(prefix.size()), v);
  return out;
}

namespace {

bool IsModelKey(const std::string &key) {
  for (const char *p : {"model.", "encoder.", "dprnn.", "xmodal.", "asd."})
    if (key.rfind(p, 0) == 0) return true;
  return false;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json FileRecord(const std::string &path) {
  return {{"path", path}, {"git_blob", GitBlobHashFile(path)}};
}

}  // namespace

std::string EnsureCorpus(const CorpusConfig &config, const std::string &dir) {
  const std::string conf = (fs::path(dir) / "corpus.conf").string();
  const std::string manifest = (fs::path(dir) / "manifest.jsonl").string();
  if (fs::exists(conf) && fs::exists(manifest) && ReadFile(conf) == config.ToKv().Dump())
    return manifest;
  GenerateCorpus(config, dir);
  return manifest;
}

ExperimentResult RunExperiment(const KvConfig &recipe, const ProgressFn &progress) {
  const std::string name = recipe.GetString("name", "experiment");
  const std::string out_dir = recipe.GetString("out_dir", "runs/" + name);
  const uint64_t seed = recipe.GetU64("seed", 1);
  fs::create_directories(out_dir);

  // Reject unknown top-level keys before spending time on training.
  static const char *kPrefixes[] = {"corpus.",           "model.", "encoder.", "dprnn.",
                                    "xmodal.",           "asd.",   "reuse.",   "eval.",
                                    "asd_pretrain.",     "overlap_pretrain.",
                                    "sparse_finetune."};
  for (const auto &[k, v] : recipe.values()) {
    if (k == "name" || k == "out_dir" || k == "seed") continue;
    bool known = false;
    for (const char *p : kPrefixes) known = known || k.rfind(p, 0) == 0;
    Require(known, ErrorCode::kConfig, "unknown recipe key '" + k + "'");
  }

  KvConfig corpus_kv = SubConfig(recipe, "corpus.");
  const std::string corpus_dir = corpus_kv.GetString("dir", (fs::path(out_dir) / "corpus").string());
  KvConfig corpus_only;
  for (const auto &[k, v] : corpus_kv.values())
    if (k != "dir") corpus_only.Set(k, v);
  const CorpusConfig corpus = CorpusConfig::FromKv(corpus_only);
  corpus_only.CheckAllConsumed();
  const std::string manifest_path = EnsureCorpus(corpus, corpus_dir);

  KvConfig model_kv;
  for (const auto &[k, v] : recipe.values())
    if (IsModelKey(k)) model_kv.Set(k, v);
  const SystemConfig model = SystemConfig::FromKv(model_kv);
  model_kv.CheckAllConsumed();

  nlohmann::json prov;
  prov["name"] = name;
  prov["seed"] = seed;
  prov["recipe"] = recipe.values();
  prov["corpus"] = {{"config", corpus.ToKv().values()}, {"manifest", FileRecord(manifest_path)}};
  prov["stages"] = nlohmann::json::array();

  ExperimentResult result;
  std::string previous;
  auto run_stage = [&](Stage stage) {
    const std::string sname = StageName(stage);
    const std::string reuse = recipe.GetString("reuse." + sname, "");
    nlohmann::json record = {{"stage", sname}};
    if (!reuse.empty()) {
      Require(CheckpointStage(reuse) == sname, ErrorCode::kMissingPrerequisiteCheckpoint,
              reuse + " is not a " + sname + " checkpoint");
      record["reused"] = FileRecord(reuse);
      result.checkpoints[sname] = previous = reuse;
      prov["stages"].push_back(record);
      return;
    }
    KvConfig kv = model_kv;
    kv.Set("stage", sname);
    kv.Set("seed", std::to_string(DeriveSeed({seed, static_cast<uint64_t>(stage)})));
    kv.Set("out_dir", out_dir);
    kv.Set("data.manifest", manifest_path);
    if (stage == Stage::kOverlapPretrain) kv.Set("data.dynamic_mix", "true");
    if (!previous.empty()) kv.Set("init", previous);
    kv.Merge(SubConfig(recipe, sname + "."));
    const TrainConfig cfg = TrainConfig::FromKv(kv);
    kv.CheckAllConsumed();
    const auto start = std::chrono::steady_clock::now();
    const TrainResult tr = Train(cfg, progress);
    record["seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record["config"] = FileRecord((fs::path(out_dir) / (sname + ".conf")).string());
    record["checkpoint"] = FileRecord(tr.checkpoint);
    record["best_validation_loss"] = tr.best_validation_loss;
    record["early_stopped"] = tr.early_stopped;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto &e : tr.history)
      hist.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"validation_loss", e.validation_loss},
                      {"lr", e.lr}});
    record["history"] = hist;
    prov["stages"].push_back(record);
    result.checkpoints[sname] = previous = tr.checkpoint;
  };

  if (model.kind != SystemKind::kBaseline) run_stage(Stage::kAsdPretrain);
  run_stage(Stage::kOverlapPretrain);
  run_stage(Stage::kSparseFinetune);

  TseSystem system(model);
  system.LoadWeights(previous);
  const Split split = ParseSplit(recipe.GetString("eval.split", "test"));
  const Manifest manifest = LoadManifest(manifest_path);
  result.reports = Evaluate(system, manifest, name, split);
  const double flip = recipe.GetDouble("eval.gate_flip_fraction", 0.0);
  if (flip > 0.0) {
    const auto clips = LoadSplit(manifest, split);
    result.reports.push_back(EvaluateCorruptedGate(
        system, clips, flip, recipe.GetU64("eval.gate_flip_seed", 1),
        name + " (gate flipped " + std::to_string(static_cast<int>(flip * 100 + 0.5)) + "%)",
        result.reports.front().dataset_tag));
  }

  const std::string md = (fs::path(out_dir) / "report.md").string();
  const std::string tsv = (fs::path(out_dir) / "report.tsv").string();
  std::ofstream(md) << RenderReport(result.reports, ReportFormat::kMarkdown);
  std::ofstream(tsv) << RenderReport(result.reports, ReportFormat::kTsv);
  prov["reports"] = {FileRecord(md), FileRecord(tsv)};
  result.provenance_path = (fs::path(out_dir) / "provenance.json").string();
  std::ofstream(result.provenance_path) << prov.dump(2) << "\n";
  return result;
}

}  // namespace aex
