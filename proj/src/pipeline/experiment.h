// pipeline/experiment.h

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

#ifndef AEX_PIPELINE_EXPERIMENT_H_
#define AEX_PIPELINE_EXPERIMENT_H_

#include <map>
#include <string>
#include <vector>

#include "base/kv_config.h"
#include "pipeline/evaluate.h"
#include "pipeline/train.h"

namespace aex {

struct ExperimentResult {
  std::map<std::string, std::string> checkpoints;  // stage name -> path
  std::vector<EvalReport> reports;                 // Mixture row, system row
  std::string provenance_path;
};

/// Copies keys under `prefix` with the prefix removed.
KvConfig SubConfig(const KvConfig &kv, const std::string &prefix);

/// Recipe keys:
///   name, out_dir, seed
///   corpus.*            corpus config; corpus.dir overrides <out_dir>/corpus
///   model.*, encoder.*, dprnn.*, xmodal.*, asd.*   shared model config
///   <stage>.*           per-stage training keys (see TrainConfig)
///   reuse.asd_pretrain, reuse.overlap_pretrain     existing checkpoints
///   eval.split, eval.gate_flip_fraction, eval.gate_flip_seed
/// Runs the stages the system needs, evaluates, writes report.md,
/// report.tsv and provenance.json under out_dir.
ExperimentResult RunExperiment(const KvConfig &recipe, const ProgressFn &progress = nullptr);

/// Generates the corpus unless <dir>/corpus.conf already holds the same
/// configuration; returns the manifest path.
std::string EnsureCorpus(const CorpusConfig &config, const std::string &dir);

}  // namespace aex

#endif  // AEX_PIPELINE_EXPERIMENT_H_
