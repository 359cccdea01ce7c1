// tests/unit/separator_test.cc

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

#include "doctest.h"
#include "base/error.h"
#include "base/random.h"
#include "mixer/clip.h"
#include "mixer/speaker.h"
#include "nn/ops.h"
#include "separator/separator.h"
#include "separator/systems.h"

using namespace aex;
using nn::Mat;

namespace {

MixtureClip TestClip(double seconds = 2.0) {
  static const auto pool = MakeSpeakerPool(4, 1);
  MixtureSpec spec;
  spec.clip_id = "sep";
  spec.target = {"spk00", {{0.0, seconds / 2}}};
  spec.interferer = {"spk01", {{seconds / 4, seconds / 2}}};
  spec.total_duration_s = seconds;
  spec.seed = 9;
  return BuildClip(spec, pool);
}

Mat RandomMat(Rng &rng, Eigen::Index r, Eigen::Index c) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.Normal());
  return m;
}

}  // namespace

TEST_CASE("encoder frame arithmetic") {
  CHECK(EncoderFrames(16000, {16, 256}) == 1999);
  CHECK(EncoderFrames(16000, {40, 256}) == 799);
  CHECK(EncoderFrames(64000, {40, 256}) == 3199);
  CHECK(EncoderFrames(17, {16, 256}) == 2);  // right padded to a whole frame
  CHECK_THROWS_AS(EncoderFrames(15, {16, 256}), Error);
}

TEST_CASE("encoder and decoder contracts") {
  nn::ParamStore store(3);
  const EncoderConfig cfg{16, 32};
  AudioEncoder enc(store, "enc", cfg);
  AudioDecoder dec(store, "dec", cfg);
  nn::NoGradGuard guard;
  const auto zero = enc(Waveform::Zeros(1001));
  CHECK(zero.rows() == EncoderFrames(1001, cfg));
  CHECK(zero.value().isZero());
  const auto out = dec(zero, 1001);
  CHECK(out.rows() == 1001);
  CHECK(out.value().isZero());

  Rng rng(4);
  std::vector<double> y(1001);
  for (auto &v : y) v = rng.Normal(0, 0.1);
  const auto h = enc(Waveform(y));
  CHECK(h.value().minCoeff() >= 0.0f);
  // ReLU analysis is positively homogeneous.
  std::vector<double> y3 = y;
  for (auto &v : y3) v *= 3.0;
  CHECK((enc(Waveform(y3)).value() - 3.0f * h.value()).cwiseAbs().maxCoeff() < 1e-5);
  // Synthesis is linear: superposition on random feature pairs.
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = RandomMat(rng, h.rows(), 32), b = RandomMat(rng, h.rows(), 32);
    const Mat fa = dec(nn::Constant(a), 1001).value(), fb = dec(nn::Constant(b), 1001).value();
    const Mat fab = dec(nn::Constant(a + b), 1001).value();
    CHECK((fab - fa - fb).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("reference upsampling") {
  auto counts = [](Eigen::Index src, Eigen::Index dst) {
    std::vector<int> c(static_cast<size_t>(src), 0);
    for (int i : UpsampleIndex(src, dst)) ++c[i];
    return c;
  };
  CHECK(counts(100, 2000) == std::vector<int>(100, 20));
  auto c = counts(100, 1999);
  CHECK(std::count(c.begin(), c.end() - 1, 20) == 99);
  CHECK(c.back() == 19);
  CHECK(counts(1, 37) == std::vector<int>{37});
  const auto idx = UpsampleIndex(100, 1999);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK_THROWS_AS(UpsampleIndex(10, 9), Error);
}

TEST_CASE("chunking covers every frame") {
  for (Eigen::Index frames : {1, 49, 50, 51, 100, 1001}) {
    const auto idx = ChunkIndex(frames, 50);
    CHECK(idx.size() % 50 == 0);
    std::vector<int> hits(static_cast<size_t>(frames), 0);
    for (int i : idx)
      if (i >= 0) ++hits[i];
    for (int h : hits) CHECK((h == 1 || h == 2));
  }
}

TEST_CASE("DPRNN mask contract") {
  nn::ParamStore store(5);
  DprnnSeparator sep(store, "dprnn", {16, 20, 2, 8}, 32, 128);
  Rng rng(6);
  nn::NoGradGuard guard;
  const auto h = nn::Constant(RandomMat(rng, 75, 32).cwiseAbs());
  const auto m = sep(h, nn::Constant(RandomMat(rng, 10, 128)));
  CHECK(m.rows() == 75);
  CHECK(m.cols() == 32);
  CHECK(m.value().minCoeff() >= 0.0f);
  CHECK(m.value().maxCoeff() <= 1.0f);
  const auto z = sep(nn::Constant(Mat::Zero(75, 32)), nn::Constant(Mat::Zero(10, 128)));
  CHECK((z.value().array() == z.value()(0, 0)).all());
  CHECK(z.value() == sep(nn::Constant(Mat::Zero(75, 32)), nn::Constant(Mat::Zero(10, 128))).value());
  CHECK_THROWS_AS(sep(h, nn::Constant(Mat::Zero(10, 64))), Error);
}

TEST_CASE("cross-modal attention normalises over video frames") {
  nn::ParamStore store(7);
  const EncoderConfig enc{16, 32};
  XModalSeparator sep(store, "xmodal", {160, 1, 1, 32, 4, 64, 0.04}, enc, 384);
  Rng rng(8);
  nn::NoGradGuard guard;
  std::vector<Mat> weights;
  const auto m = sep.Forward(nn::Constant(RandomMat(rng, 3998, 32).cwiseAbs()),
                             nn::Constant(RandomMat(rng, 100, 384)), &weights);
  CHECK(m.rows() == 3998);
  CHECK(m.cols() == 32);
  CHECK(m.value().minCoeff() >= 0.0f);
  CHECK(m.value().maxCoeff() <= 1.0f);
  REQUIRE(weights.size() == 4);
  for (const auto &w : weights) {
    CHECK(w.cols() == 100);
    CHECK((w.rowwise().sum().array() - 1.0f).abs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("systems preserve length for both backbones and all reference modes") {
  const auto clip = TestClip();
  for (auto backbone : {Backbone::kXModal, Backbone::kDprnn}) {
    for (auto mode : {ReferenceMode::kBoth, ReferenceMode::kPvOnly, ReferenceMode::kPavOnly}) {
      auto cfg = SystemConfig::Preset("toy", backbone);
      cfg.mode = mode;
      TseSystem sys(cfg);
      const auto est = sys.Extract(clip.mixture, clip.target_visual);
      CHECK(est.size() == clip.mixture.size());
      CHECK(sys.Extract(clip.mixture, clip.target_visual).samples() == est.samples());
    }
  }
  auto odd = TestClip(1.3);
  TseSystem sys(SystemConfig::Preset("toy"));
  CHECK(sys.Extract(odd.mixture, odd.target_visual).size() == odd.mixture.size());
}

TEST_CASE("extraction loss reaches the ASD visual encoder") {
  const auto clip = TestClip();
  for (auto backbone : {Backbone::kXModal, Backbone::kDprnn}) {
    TseSystem sys(SystemConfig::Preset("toy", backbone));
    const auto out = sys.Forward(clip.mixture, clip.target_visual);
    CHECK(out.mask.value().minCoeff() >= 0.0f);
    CHECK(out.mask.value().maxCoeff() <= 1.0f);
    nn::Backward(nn::MatMulNT(nn::Reshape(out.estimate, 1, out.estimate.rows()),
                              nn::Reshape(out.estimate, 1, out.estimate.rows())));
    CHECK(sys.asd().params().Find("visual_enc.0.weight").grad().norm() > 0.0f);
    CHECK(sys.TrainableStores().size() == 2);
  }
  auto cfg = SystemConfig::Preset("toy");
  cfg.freeze_asd = true;
  TseSystem frozen(cfg);
  CHECK(frozen.TrainableStores().size() == 1);
  const auto out = frozen.Forward(clip.mixture, clip.target_visual);
  CHECK_FALSE(out.asd->p_v.requires_grad());
}

TEST_CASE("gated baseline contract") {
  const auto clip = TestClip();
  auto cfg = SystemConfig::Preset("toy");
  cfg.kind = SystemKind::kGatedBaseline;
  TseSystem sys(cfg);
  const auto off = sys.ExtractWithGate(clip.mixture, clip.target_visual, false);
  CHECK(off.size() == clip.mixture.size());
  for (double s : off.samples()) CHECK(s == 0.0);
  const auto on = sys.ExtractWithGate(clip.mixture, clip.target_visual, true);
  nn::NoGradGuard guard;
  const auto raw = sys.Forward(clip.mixture, clip.target_visual).estimate.value();
  bool same = true;
  for (size_t i = 0; i < on.size(); ++i) same = same && on[i] == static_cast<double>(raw(i, 0));
  CHECK(same);
  const bool gate = sys.GateDecision(clip.mixture, clip.target_visual);
  CHECK(sys.Extract(clip.mixture, clip.target_visual).samples() ==
        sys.ExtractWithGate(clip.mixture, clip.target_visual, gate).samples());
}

TEST_CASE("system checkpoints round trip") {
  const auto clip = TestClip();
  auto cfg = SystemConfig::Preset("toy");
  cfg.mode = ReferenceMode::kPavOnly;
  cfg.seed = 77;
  TseSystem sys(cfg);
  const auto path = (std::filesystem::temp_directory_path() / "aex_sys_test.ckpt").string();
  sys.Save(path, "overlap_pretrain", R"({"note": 1})");
  std::string stage;
  const auto loaded = TseSystem::Load(path, &stage);
  CHECK(stage == "overlap_pretrain");
  CHECK(loaded->config().mode == ReferenceMode::kPavOnly);
  CHECK(loaded->Extract(clip.mixture, clip.target_visual).samples() ==
        sys.Extract(clip.mixture, clip.target_visual).samples());
  CHECK(sys.ModelCard("overlap_pretrain").find("preset: toy") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("presets") {
  const auto full = SystemConfig::Preset("full");
  CHECK(full.encoder.kernel_L == 16);
  CHECK(full.encoder.channels_N == 256);
  CHECK(full.xmodal.chunk_C == 160);
  CHECK(full.xmodal.n_intra == 4);
  CHECK(full.xmodal.n_inter == 4);
  CHECK(full.xmodal.heads == 8);
  const auto dprnn = SystemConfig::Preset("full", Backbone::kDprnn);
  CHECK(dprnn.encoder.kernel_L == 40);
  CHECK(dprnn.dprnn.feature_B == 64);
  CHECK(dprnn.dprnn.chunk_K == 100);
  CHECK(dprnn.dprnn.repeats_R == 6);
  KvConfig kv;
  full.ToKv(&kv);
  const auto back = SystemConfig::FromKv(kv);
  CHECK(back.xmodal.ff_dim == full.xmodal.ff_dim);
  CHECK_THROWS_AS(SystemConfig::Preset("huge"), Error);
}
