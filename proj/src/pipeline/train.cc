// pipeline/train.cc

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

#include "pipeline/train.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "base/error.h"
#include "base/random.h"
#include "json.hpp"
#include "nn/checkpoint.h"
#include "nn/ops.h"
#include "pipeline/schedule.h"

namespace aex {

namespace fs = std::filesystem;
using nn::Mat;
using nn::Var;

std::string StageName(Stage stage) {
  switch (stage) {
    case Stage::kAsdPretrain: return "asd_pretrain";
    case Stage::kOverlapPretrain: return "overlap_pretrain";
    case Stage::kSparseFinetune: return "sparse_finetune";
  }
  return "?";
}

Stage ParseStage(const std::string &name) {
  if (name == "asd_pretrain") return Stage::kAsdPretrain;
  if (name == "overlap_pretrain") return Stage::kOverlapPretrain;
  if (name == "sparse_finetune") return Stage::kSparseFinetune;
  Fail(ErrorCode::kConfig, "unknown stage '" + name + "'");
}

TrainConfig TrainConfig::FromKv(const KvConfig &kv) {
  TrainConfig c;
  c.stage = ParseStage(kv.GetString("stage"));
  const std::string default_loss = c.stage == Stage::kSparseFinetune ? "sadl_b" : "sdr";
  c.loss_preset = kv.GetString("loss", default_loss);
  c.loss = LossConfig::Preset(c.loss_preset);
  c.lr_init = kv.GetDouble("lr_init", c.lr_init);
  c.halve_patience = static_cast<int>(kv.GetInt("halve_patience", c.halve_patience));
  c.stop_patience = static_cast<int>(kv.GetInt("stop_patience", c.stop_patience));
  c.max_epochs = static_cast<int>(
      kv.GetInt("max_epochs", c.stage == Stage::kSparseFinetune ? 30 : 100));
  c.batch_size = static_cast<int>(kv.GetInt("batch_size", c.batch_size));
  c.seed = kv.GetU64("seed", c.seed);
  c.manifest = kv.GetString("data.manifest", "");
  c.dynamic_mix = kv.GetBool("data.dynamic_mix", false);
  c.clips_per_epoch = static_cast<int>(kv.GetInt("data.clips_per_epoch", c.clips_per_epoch));
  c.validation_clips =
      static_cast<int>(kv.GetInt("data.validation_clips", c.validation_clips));
  c.max_train_clips = static_cast<int>(kv.GetInt("data.max_train_clips", c.max_train_clips));
  c.speakers = static_cast<int>(kv.GetInt("data.speakers", c.speakers));
  c.speaker_seed =
      kv.GetU64("data.speaker_seed", c.speaker_seed);
  c.tp_only = kv.GetBool("data.tp_only", c.loss.kind == LossKind::kSdr);
  c.init = kv.GetString("init", "");
  c.out_dir = kv.GetString("out_dir", c.out_dir);
  c.model = SystemConfig::FromKv(kv);
  c.Validate();
  return c;
}

KvConfig TrainConfig::ToKv() const {
  KvConfig kv;
  kv.Set("stage", StageName(stage));
  kv.Set("loss", loss_preset);
  std::ostringstream lr;
  lr.precision(17);
  lr << lr_init;
  kv.Set("lr_init", lr.str());
  kv.Set("halve_patience", std::to_string(halve_patience));
  kv.Set("stop_patience", std::to_string(stop_patience));
  kv.Set("max_epochs", std::to_string(max_epochs));
  kv.Set("batch_size", std::to_string(batch_size));
  kv.Set("seed", std::to_string(seed));
  if (!manifest.empty()) kv.Set("data.manifest", manifest);
  kv.Set("data.dynamic_mix", dynamic_mix ? "true" : "false");
  kv.Set("data.clips_per_epoch", std::to_string(clips_per_epoch));
  kv.Set("data.validation_clips", std::to_string(validation_clips));
  kv.Set("data.max_train_clips", std::to_string(max_train_clips));
  kv.Set("data.speakers", std::to_string(speakers));
  kv.Set("data.speaker_seed", std::to_string(speaker_seed));
  kv.Set("data.tp_only", tp_only ? "true" : "false");
  if (!init.empty()) kv.Set("init", init);
  kv.Set("out_dir", out_dir);
  model.ToKv(&kv);
  return kv;
}

void TrainConfig::Validate() const {
  loss.Validate();
  Require(lr_init > 0.0, ErrorCode::kConfig, "lr_init must be positive");
  Require(max_epochs > 0 && batch_size > 0, ErrorCode::kConfig,
          "max_epochs and batch_size must be positive");
  Require(halve_patience > 0 && stop_patience > 0, ErrorCode::kConfig,
          "patience values must be positive");
  if (stage == Stage::kOverlapPretrain)
    Require(loss.kind == LossKind::kSdr, ErrorCode::kConfig,
            "overlap_pretrain trains with the sdr loss");
  if (stage == Stage::kSparseFinetune) {
    // The gated baseline's extractor is finetuned on target-present clips
    // with the plain SDR loss; every other system uses SA-SDR or SADL.
    const bool sdr_allowed = model.kind != SystemKind::kActiveExtract && tp_only;
    Require(loss.kind != LossKind::kSdr || sdr_allowed, ErrorCode::kConfig,
            "sparse_finetune uses sa_sdr or sadl (sdr only for baselines on TP clips)");
  }
  if (stage != Stage::kAsdPretrain && loss.kind == LossKind::kSdr)
    Require(tp_only || dynamic_mix, ErrorCode::kConfig,
            "the sdr loss is undefined on target-absent clips; set data.tp_only");
  if (stage == Stage::kAsdPretrain)
    Require(model.kind != SystemKind::kBaseline, ErrorCode::kConfig,
            "the baseline has no ASD to pretrain");
  if (dynamic_mix)
    Require(clips_per_epoch > 0 && validation_clips > 0 && speakers >= 2, ErrorCode::kConfig,
            "dynamic mixing needs clips, validation clips and two speakers");
}

Example MakeExample(ClipData clip) {
  Example e;
  e.mfcc = VideoRateMfcc(clip.mixture);
  e.frame_labels = FrameLabels(clip.target_mask);
  e.clip = std::move(clip);
  return e;
}

std::string CheckpointStage(const std::string &path) {
  Require(fs::exists(path), ErrorCode::kMissingPrerequisiteCheckpoint,
          "checkpoint " + path + " does not exist");
  return nlohmann::json::parse(nn::Checkpoint::Load(path).metadata).value("stage", "");
}

namespace {

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::vector<float> Column(const Var &v) {
  return std::vector<float>(v.value().data(), v.value().data() + v.value().size());
}

Mat AsColumn(const std::vector<float> &g) {
  return Eigen::Map<const Mat>(g.data(), static_cast<Eigen::Index>(g.size()), 1);
}

std::vector<float> Reference(const Example &e) {
  return std::vector<float>(e.clip.target.samples().begin(), e.clip.target.samples().end());
}

// Loss over one batch of estimates; with `backward` the gradients are
// attached and propagated. Returns NaN for an SA-SDR batch whose references
// are all silent (nothing to learn from).
double ExtractionLoss(const LossConfig &loss, const std::vector<Var> &estimates,
                      const std::vector<const Example *> &batch, bool backward) {
  const size_t k = batch.size();
  std::vector<std::vector<float>> est(k), ref(k), grads(k);
  for (size_t i = 0; i < k; ++i) {
    est[i] = Column(estimates[i]);
    ref[i] = Reference(*batch[i]);
  }
  double value = 0.0;
  if (loss.kind == LossKind::kSaSdr) {
    std::vector<std::span<const float>> es(est.begin(), est.end()), rs(ref.begin(), ref.end());
    double energy = 0.0;
    for (const auto &r : ref)
      for (float x : r) energy += static_cast<double>(x) * x;
    if (energy < kEps) return std::nan("");
    value = SaSdrLoss<float>(es, rs, loss.eps, backward ? &grads : nullptr);
  } else {
    for (size_t i = 0; i < k; ++i) {
      std::vector<float> *g = backward ? &grads[i] : nullptr;
      value += loss.kind == LossKind::kSdr
                   ? SdrLoss<float>(est[i], ref[i], loss.eps, g)
                   : SadlLoss<float>(est[i], ref[i], batch[i]->clip.segmentation,
                                     loss.sadl_weights, loss.eps, g);
    }
    value /= static_cast<double>(k);
    if (backward)
      for (auto &g : grads)
        for (auto &x : g) x /= static_cast<float>(k);
  }
  Require(std::isfinite(value), ErrorCode::kDivergedLoss, "training loss is not finite");
  if (backward) {
    std::vector<Mat> gm;
    for (const auto &g : grads) gm.push_back(AsColumn(g));
    nn::Backward(nn::ExternalLoss(estimates, static_cast<float>(value), std::move(gm)));
  }
  return value;
}

// Stage-specific model wrapper so the epoch loop is shared.
class StageModel {
 public:
  explicit StageModel(const TrainConfig &cfg) : cfg_(cfg) {
    if (cfg.stage == Stage::kAsdPretrain) {
      AsdConfig asd = cfg.model.asd;
      asd.seed = DeriveSeed({cfg.model.seed, asd.seed});
      asd_ = std::make_unique<AsdModel>(asd);
      stores_ = {&asd_->params()};
    } else {
      system_ = std::make_unique<TseSystem>(cfg.model);
      InitFromPrerequisite();
      stores_ = system_->TrainableStores();
      if (system_->has_asd() && cfg.model.freeze_asd) all_stores_.push_back(&system_->asd().params());
    }
    all_stores_.insert(all_stores_.end(), stores_.begin(), stores_.end());
  }

  const std::vector<nn::ParamStore *> &trainable() const { return stores_; }

  double Batch(const std::vector<const Example *> &batch, bool backward) {
    if (asd_) {
      double total = 0.0;
      for (const Example *e : batch) {
        Var l = AsdLoss(asd_->Forward(e->mfcc, e->clip.visual), e->frame_labels);
        total += l.value()(0, 0);
        if (backward) nn::Backward(l, Mat::Constant(1, 1, 1.0f / batch.size()));
      }
      Require(std::isfinite(total), ErrorCode::kDivergedLoss, "training loss is not finite");
      return total / batch.size();
    }
    std::vector<Var> estimates;
    for (const Example *e : batch)
      estimates.push_back(system_->Forward(e->clip.mixture, e->clip.visual, &e->mfcc).estimate);
    return ExtractionLoss(cfg_.loss, estimates, batch, backward);
  }

  std::vector<std::vector<Mat>> Snapshot() const {
    std::vector<std::vector<Mat>> s;
    for (auto *store : all_stores_) s.push_back(store->Snapshot());
    return s;
  }
  void Restore(const std::vector<std::vector<Mat>> &s) {
    for (size_t i = 0; i < s.size(); ++i) all_stores_[i]->Restore(s[i]);
  }

  void Save(const std::string &path, const std::string &extra) const {
    if (asd_) {
      asd_->Save(path);
    } else {
      system_->Save(path, StageName(cfg_.stage), extra);
    }
  }

  std::string Card() const {
    if (system_) return system_->ModelCard(StageName(cfg_.stage));
    KvConfig kv;
    asd_->config().ToKv(&kv);
    return "system: asd\nstage: asd_pretrain\nseed: " + std::to_string(cfg_.model.seed) +
           "\nparameters: " + std::to_string(asd_->params().NumParameters()) + "\n\n" +
           kv.Dump();
  }

 private:
  void InitFromPrerequisite() {
    if (cfg_.stage == Stage::kOverlapPretrain) {
      if (!system_->has_asd()) return;
      Require(!cfg_.init.empty(), ErrorCode::kMissingPrerequisiteCheckpoint,
              "overlap_pretrain of " + SystemKindName(cfg_.model.kind) +
                  " needs an asd_pretrain checkpoint (init)");
      Require(CheckpointStage(cfg_.init) == "asd_pretrain",
              ErrorCode::kMissingPrerequisiteCheckpoint,
              cfg_.init + " is not an asd_pretrain checkpoint");
      system_->LoadAsd(cfg_.init);
    } else {
      Require(!cfg_.init.empty(), ErrorCode::kMissingPrerequisiteCheckpoint,
              "sparse_finetune needs an overlap_pretrain checkpoint (init)");
      Require(CheckpointStage(cfg_.init) == "overlap_pretrain",
              ErrorCode::kMissingPrerequisiteCheckpoint,
              cfg_.init + " is not an overlap_pretrain checkpoint");
      system_->LoadWeights(cfg_.init);
    }
  }

  const TrainConfig &cfg_;
  std::unique_ptr<AsdModel> asd_;
  std::unique_ptr<TseSystem> system_;
  std::vector<nn::ParamStore *> stores_, all_stores_;
};

double Validate(StageModel &model, const std::vector<Example> &val, int batch_size) {
  nn::NoGradGuard guard;
  double total = 0.0;
  size_t counted = 0;
  for (size_t b = 0; b < val.size(); b += batch_size) {
    std::vector<const Example *> batch;
    for (size_t i = b; i < std::min(val.size(), b + batch_size); ++i) batch.push_back(&val[i]);
    const double v = model.Batch(batch, false);
    if (std::isnan(v)) continue;
    total += v * batch.size();
    counted += batch.size();
  }
  Require(counted > 0, ErrorCode::kEmptyManifest, "no usable validation clips");
  return total / counted;
}

bool Keep(const ClipData &clip, const TrainConfig &cfg) {
  return !cfg.tp_only || clip.category.kind == ClipKind::kTP;
}

}  // namespace

TrainResult TrainOn(const TrainConfig &cfg, const EpochSource &train,
                    const std::vector<Example> &validation, const ProgressFn &progress) {
  cfg.Validate();
  Require(!validation.empty(), ErrorCode::kEmptyManifest, "no validation clips");
  fs::create_directories(cfg.out_dir);
  StageModel model(cfg);
  std::vector<std::unique_ptr<nn::Adam>> optimizers;
  for (auto *store : model.trainable())
    optimizers.push_back(std::make_unique<nn::Adam>(*store, cfg.lr_init));

  PlateauSchedule schedule(cfg.lr_init, cfg.halve_patience, cfg.stop_patience);
  TrainResult result;
  auto best = model.Snapshot();
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto clips = train(epoch);
    Require(!clips.empty(), ErrorCode::kEmptyManifest, "no training clips");
    double total = 0.0;
    size_t counted = 0;
    for (size_t b = 0; b < clips.size(); b += cfg.batch_size) {
      const std::vector<const Example *> batch(
          clips.begin() + b, clips.begin() + std::min(clips.size(), b + cfg.batch_size));
      const double v = model.Batch(batch, true);
      if (std::isnan(v)) {
        for (auto *store : model.trainable()) store->ZeroGrad();
        continue;
      }
      for (auto &opt : optimizers) opt->Step();
      total += v * batch.size();
      counted += batch.size();
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.train_loss = counted ? total / counted : std::nan("");
    log.validation_loss = Validate(model, validation, cfg.batch_size);
    log.lr = schedule.lr();
    const auto decision = schedule.Observe(log.validation_loss);
    log.improved = decision.improved;
    log.seconds = Seconds(start);
    if (decision.improved) best = model.Snapshot();
    for (auto &opt : optimizers) opt->set_lr(decision.lr);
    result.history.push_back(log);
    if (progress) progress(log);
    if (decision.stop) {
      result.early_stopped = true;
      break;
    }
  }
  model.Restore(best);
  result.best_validation_loss = schedule.best();

  const std::string stem = (fs::path(cfg.out_dir) / StageName(cfg.stage)).string();
  nlohmann::json extra;
  extra["best_validation_loss"] = result.best_validation_loss;
  extra["epochs"] = result.history.size();
  extra["seed"] = cfg.seed;
  result.checkpoint = stem + ".ckpt";
  model.Save(result.checkpoint, extra.dump());
  std::ofstream(stem + ".conf") << cfg.ToKv().Dump();
  std::ofstream(stem + ".card.txt") << model.Card();
  return result;
}

TrainResult Train(const TrainConfig &cfg, const ProgressFn &progress) {
  cfg.Validate();
  std::vector<Example> validation;
  EpochSource source;
  if (cfg.dynamic_mix) {
    const auto pool = MakeSpeakerPool(cfg.speakers, cfg.speaker_seed);
    DynamicMixer val_mixer(pool, DeriveSeed({cfg.seed, 2}));
    for (const auto &clip : val_mixer.Next(cfg.validation_clips))
      validation.push_back(MakeExample(ToClipData(clip)));
    auto mixer = std::make_shared<DynamicMixer>(pool, DeriveSeed({cfg.seed, 1}));
    auto buffer = std::make_shared<std::vector<Example>>();
    const int count = cfg.clips_per_epoch;
    source = [mixer, buffer, count](int) {
      buffer->clear();
      for (const auto &clip : mixer->Next(count)) buffer->push_back(MakeExample(ToClipData(clip)));
      std::vector<const Example *> out;
      for (const auto &e : *buffer) out.push_back(&e);
      return out;
    };
  } else {
    Require(!cfg.manifest.empty(), ErrorCode::kConfig, "data.manifest is required");
    const auto manifest = LoadManifest(cfg.manifest);
    auto train = std::make_shared<std::vector<Example>>();
    for (const auto &entry : manifest.entries) {
      if (entry.split == Split::kTest) continue;
      auto clip = LoadClip(manifest, entry);
      if (!Keep(clip, cfg)) continue;
      if (entry.split == Split::kValidation) {
        validation.push_back(MakeExample(std::move(clip)));
      } else if (cfg.max_train_clips == 0 ||
                 static_cast<int>(train->size()) < cfg.max_train_clips) {
        train->push_back(MakeExample(std::move(clip)));
      }
    }
    Require(!train->empty(), ErrorCode::kEmptyManifest,
            cfg.manifest + " has no usable training clips");
    const uint64_t seed = cfg.seed;
    source = [train, seed](int epoch) {
      std::vector<const Example *> out;
      for (const auto &e : *train) out.push_back(&e);
      Rng rng(DeriveSeed({seed, 3, static_cast<uint64_t>(epoch)}));
      for (size_t i = out.size(); i > 1; --i)
        std::swap(out[i - 1], out[rng.UniformInt(0, static_cast<int64_t>(i) - 1)]);
      return out;
    };
  }
  return TrainOn(cfg, source, validation, progress);
}

}  // namespace aex
