// tools/aex.cc

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

// Command-line front end: corpus generation, training, evaluation,
// experiments and the property suites.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "base/error.h"
#include "base/kv_config.h"
#include "mixer/corpus.h"
#include "pipeline/checks.h"
#include "pipeline/evaluate.h"
#include "pipeline/experiment.h"
#include "pipeline/train.h"
#include "separator/systems.h"

namespace {

using namespace aex;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kPlacementOverflow:
    case ErrorCode::kUnsatisfiableHistogram:
    case ErrorCode::kMissingPrerequisiteCheckpoint:
      return kExitConfig;
    case ErrorCode::kDivergedLoss:
    case ErrorCode::kNonFiniteGradient:
      return kExitDiverged;
    default:
      return kExitFailure;
  }
}

// --set key=value overrides applied on top of a config file.
KvConfig LoadWithOverrides(const std::string &path, const std::vector<std::string> &sets) {
  KvConfig kv = path.empty() ? KvConfig() : KvConfig::FromFile(path);
  for (const auto &s : sets) {
    const auto eq = s.find('=');
    Require(eq != std::string::npos, ErrorCode::kConfig, "--set expects key=value: " + s);
    kv.Set(s.substr(0, eq), s.substr(eq + 1));
  }
  return kv;
}

void PrintEpoch(const EpochLog &e) {
  std::fprintf(stderr, "epoch %3d  train %9.4f  valid %9.4f  lr %.3g%s  (%.1fs)\n", e.epoch,
               e.train_loss, e.validation_loss, e.lr, e.improved ? "  *" : "", e.seconds);
}

int PrintChecks(const std::vector<CheckResult> &results) {
  bool ok = true;
  for (const auto &r : results) {
    std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Audio-visual target speaker extraction for sparsely overlapped speech"};
  app.require_subcommand(1);

  auto *mix = app.add_subcommand("mix", "Synthetic corpus tools");
  mix->require_subcommand(1);
  std::string mix_config, mix_out, stats_manifest;
  std::vector<std::string> mix_sets;
  auto *generate = mix->add_subcommand("generate", "Generate a corpus and its manifest");
  generate->add_option("--config", mix_config, "Corpus config file");
  generate->add_option("--out", mix_out, "Output directory")->required();
  generate->add_option("--set", mix_sets, "Override key=value");
  auto *stats = mix->add_subcommand("stats", "Per-split category counts and hours");
  stats->add_option("--manifest", stats_manifest, "Manifest file")->required();

  std::string train_config, train_init;
  std::vector<std::string> train_sets;
  auto *train = app.add_subcommand("train", "Run one training stage");
  train->add_option("--config", train_config, "Training config file")->required();
  train->add_option("--init", train_init, "Checkpoint of the previous stage");
  train->add_option("--set", train_sets, "Override key=value");

  std::string eval_ckpt, eval_manifest, eval_out, eval_split = "test", eval_format = "markdown",
                                                  eval_tag;
  auto *eval = app.add_subcommand("eval", "Evaluate a checkpoint on a manifest split");
  eval->add_option("--ckpt", eval_ckpt, "Extraction checkpoint")->required();
  eval->add_option("--manifest", eval_manifest, "Manifest file")->required();
  eval->add_option("--out", eval_out, "Report file (stdout if omitted)");
  eval->add_option("--split", eval_split, "train, validation or test");
  eval->add_option("--format", eval_format, "markdown or tsv");
  eval->add_option("--tag", eval_tag, "Row label (defaults to the checkpoint name)");

  std::string recipe_path;
  std::vector<std::string> recipe_sets;
  auto *experiment = app.add_subcommand("experiment", "Run all stages of a recipe and evaluate");
  experiment->add_option("--recipe", recipe_path, "Recipe file")->required();
  experiment->add_option("--set", recipe_sets, "Override key=value");

  uint64_t check_seed = 1;
  size_t check_coords = 100;
  int check_trials = 1000;
  auto *grads = app.add_subcommand("check-gradients", "Loss gradients vs finite differences");
  grads->add_option("--seed", check_seed);
  grads->add_option("--coords", check_coords);
  auto *metrics = app.add_subcommand("check-metrics", "Metric and scenario property suites");
  metrics->add_option("--seed", check_seed);
  metrics->add_option("--trials", check_trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) {
      const auto cfg = CorpusConfig::FromKv(LoadWithOverrides(mix_config, mix_sets));
      const auto manifest = GenerateCorpus(cfg, mix_out);
      std::cout << RenderStats(ComputeStats(manifest));
    } else if (stats->parsed()) {
      std::cout << RenderStats(ComputeStats(LoadManifest(stats_manifest)));
    } else if (train->parsed()) {
      auto kv = LoadWithOverrides(train_config, train_sets);
      if (!train_init.empty()) kv.Set("init", train_init);
      const auto cfg = TrainConfig::FromKv(kv);
      kv.CheckAllConsumed();
      const auto result = Train(cfg, PrintEpoch);
      std::printf("%s (best validation loss %.4f)\n", result.checkpoint.c_str(),
                  result.best_validation_loss);
    } else if (eval->parsed()) {
      const auto system = TseSystem::Load(eval_ckpt);
      const auto tag =
          eval_tag.empty() ? std::filesystem::path(eval_ckpt).stem().string() : eval_tag;
      const auto reports =
          Evaluate(*system, LoadManifest(eval_manifest), tag, ParseSplit(eval_split));
      const auto text = RenderReport(reports, ParseReportFormat(eval_format));
      if (eval_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(eval_out) << text;
      }
    } else if (experiment->parsed()) {
      const auto result =
          RunExperiment(LoadWithOverrides(recipe_path, recipe_sets), PrintEpoch);
      std::cout << RenderReport(result.reports, ReportFormat::kMarkdown);
      std::printf("provenance: %s\n", result.provenance_path.c_str());
    } else if (grads->parsed()) {
      return PrintChecks(CheckGradients(check_seed, check_coords));
    } else if (metrics->parsed()) {
      auto results = CheckMetrics(check_seed, check_trials);
      const auto scen = CheckScenarios(check_seed, check_trials);
      results.insert(results.end(), scen.begin(), scen.end());
      return PrintChecks(results);
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
