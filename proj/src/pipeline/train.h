// pipeline/train.h

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

#ifndef AEX_PIPELINE_TRAIN_H_
#define AEX_PIPELINE_TRAIN_H_

#include <functional>
#include <string>
#include <vector>

#include "base/kv_config.h"
#include "losses/losses.h"
#include "mixer/corpus.h"
#include "separator/systems.h"

namespace aex {

enum class Stage { kAsdPretrain, kOverlapPretrain, kSparseFinetune };
std::string StageName(Stage stage);
Stage ParseStage(const std::string &name);

struct TrainConfig {
  Stage stage = Stage::kOverlapPretrain;
  LossConfig loss = LossConfig::Preset("sdr");
  std::string loss_preset = "sdr";
  double lr_init = 1e-4;
  int halve_patience = 3;
  int stop_patience = 10;
  int max_epochs = 100;
  int batch_size = 4;
  uint64_t seed = 1;
  /// Corpus manifest; the overlap stage may instead mix on the fly.
  std::string manifest;
  bool dynamic_mix = false;
  int clips_per_epoch = 200;   // dynamic mixing only
  int validation_clips = 50;   // dynamic mixing only
  int max_train_clips = 0;     // 0 = every training clip of the manifest
  int speakers = 10;           // dynamic mixing speaker pool
  uint64_t speaker_seed = 7;
  bool tp_only = false;        // drop target-absent clips from the data
  std::string init;            // checkpoint of the previous stage
  std::string out_dir = ".";
  SystemConfig model;

  /// Keys: stage, loss, lr_init, halve_patience, stop_patience, max_epochs
  /// (default 100, or 30 for sparse_finetune), batch_size, seed,
  /// data.manifest, data.dynamic_mix, data.clips_per_epoch,
  /// data.validation_clips, data.max_train_clips, data.tp_only (default on
  /// for the sdr loss), data.speakers, data.speaker_seed, init,
  /// out_dir, plus the model keys read by SystemConfig::FromKv.
  static TrainConfig FromKv(const KvConfig &kv);
  KvConfig ToKv() const;
  void Validate() const;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double lr = 0.0;
  bool improved = false;
  double seconds = 0.0;
};

struct TrainResult {
  std::string checkpoint;
  double best_validation_loss = 0.0;
  std::vector<EpochLog> history;
  bool early_stopped = false;
};

using ProgressFn = std::function<void(const EpochLog &)>;

/// Runs one stage and writes <out_dir>/<stage>.ckpt (best validation
/// weights), <stage>.conf (effective config) and <stage>.card.txt.
/// sparse_finetune requires an overlap_pretrain checkpoint in `init`;
/// overlap_pretrain of a system with an ASD requires an asd_pretrain one.
TrainResult Train(const TrainConfig &config, const ProgressFn &progress = nullptr);

/// Training example with its cached video-rate MFCC.
struct Example {
  ClipData clip;
  nn::Mat mfcc;
  std::vector<uint8_t> frame_labels;
};
Example MakeExample(ClipData clip);

/// Training clips for a given epoch (0-based), already in visiting order.
using EpochSource = std::function<std::vector<const Example *>(int epoch)>;

/// Train() with the data supplied by the caller; `config.manifest` and the
/// dynamic-mixing fields are ignored.
TrainResult TrainOn(const TrainConfig &config, const EpochSource &train,
                    const std::vector<Example> &validation,
                    const ProgressFn &progress = nullptr);

/// Stage tag stored in a checkpoint ("asd_pretrain", ...).
std::string CheckpointStage(const std::string &path);

}  // namespace aex

#endif  // AEX_PIPELINE_TRAIN_H_
