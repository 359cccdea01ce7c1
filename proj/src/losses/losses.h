// losses/losses.h

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

#ifndef AEX_LOSSES_LOSSES_H_
#define AEX_LOSSES_LOSSES_H_

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "base/error.h"
#include "scenario/scenario.h"
#include "signal/metrics.h"

namespace aex {

enum class LossKind { kSdr, kSaSdr, kSadl };

std::string LossKindName(LossKind kind);
LossKind ParseLossKind(const std::string &name);

/// Per-scenario weights (alpha, beta, gamma, delta) applied to the QQ energy,
/// SQ SDR, SS SDR and QS energy terms respectively.
struct SadlWeights {
  double qq = 0.0;
  double sq = 0.0;
  double ss = 0.0;
  double qs = 0.0;
  bool operator==(const SadlWeights &) const = default;
};

inline constexpr SadlWeights kSadlOriginal{0.005, 1.0, 1.0, 0.005};
inline constexpr SadlWeights kSadlBest{0.0005, 0.1, 1.0, 0.005};

struct LossConfig {
  LossKind kind = LossKind::kSdr;
  SadlWeights sadl_weights{};
  double eps = kEps;

  /// "sdr", "sa_sdr", "sadl_o", "sadl_b".
  static LossConfig Preset(const std::string &name);
  void Validate() const;
};

/// Segments shorter than this that carry target speech are folded into their
/// longer same-polarity neighbour before SDR-type terms are evaluated.
inline constexpr size_t kMinSdrSegment = 32;

/// The segments SADL evaluates, after short-segment merging.
std::vector<Segment> SadlSegments(const ScenarioSegmentation &seg);

namespace detail {

inline constexpr double kDbPerNeper = 10.0 / 2.302585092994045684;

// -10 log10((Es + eps) / (Ee + eps)) over [begin, end); gradient added into
// grad (scaled by `weight`) when non-null.
template <typename T>
double SdrTerm(std::span<const T> est, std::span<const T> ref, size_t begin, size_t end,
               double eps, double weight, T *grad) {
  double es = 0.0, ee = 0.0;
  for (size_t i = begin; i < end; ++i) {
    const double r = ref[i], d = static_cast<double>(est[i]) - r;
    es += r * r;
    ee += d * d;
  }
  if (grad) {
    const double c = weight * kDbPerNeper * 2.0 / (ee + eps);
    for (size_t i = begin; i < end; ++i)
      grad[i] += static_cast<T>(c * (static_cast<double>(est[i]) - ref[i]));
  }
  return 10.0 * std::log10(ee + eps) - 10.0 * std::log10(es + eps);
}

// 10 log10(||est||^2 + eps) over [begin, end).
template <typename T>
double EnergyTerm(std::span<const T> est, size_t begin, size_t end, double eps,
                  double weight, T *grad) {
  double e = 0.0;
  for (size_t i = begin; i < end; ++i) e += static_cast<double>(est[i]) * est[i];
  if (grad) {
    const double c = weight * kDbPerNeper * 2.0 / (e + eps);
    for (size_t i = begin; i < end; ++i) grad[i] += static_cast<T>(c * est[i]);
  }
  return 10.0 * std::log10(e + eps);
}

}  // namespace detail

/// -10 log10((||s||^2 + eps) / (||s_hat - s||^2 + eps)). `grad`, when given,
/// is resized and overwritten with d loss / d estimate.
template <typename T>
T SdrLoss(std::span<const T> estimate, std::span<const T> reference, double eps = kEps,
          std::vector<T> *grad = nullptr) {
  Require(estimate.size() == reference.size(), ErrorCode::kLengthMismatch,
          "sdr_loss: estimate and reference lengths differ");
  double es = 0.0;
  for (T r : reference) es += static_cast<double>(r) * r;
  Require(es >= kEps, ErrorCode::kSilentReference,
          "sdr_loss: silent reference; use an energy loss for this segment");
  if (grad) grad->assign(estimate.size(), T(0));
  return static_cast<T>(detail::SdrTerm(estimate, reference, 0, estimate.size(), eps, 1.0,
                                        grad ? grad->data() : nullptr));
}

/// Source-aggregated SDR over a batch: energies are pooled before the ratio,
/// so all-silent references (TA clips) are admissible.
template <typename T>
T SaSdrLoss(const std::vector<std::span<const T>> &estimates,
            const std::vector<std::span<const T>> &references, double eps = kEps,
            std::vector<std::vector<T>> *grads = nullptr) {
  Require(!estimates.empty(), ErrorCode::kEmptyBatch, "sa_sdr_loss: empty batch");
  Require(estimates.size() == references.size(), ErrorCode::kLengthMismatch,
          "sa_sdr_loss: estimate and reference counts differ");
  double es = 0.0, ee = 0.0;
  for (size_t k = 0; k < estimates.size(); ++k) {
    Require(estimates[k].size() == references[k].size(), ErrorCode::kLengthMismatch,
            "sa_sdr_loss: pair " + std::to_string(k) + " differs in length");
    for (size_t i = 0; i < estimates[k].size(); ++i) {
      const double r = references[k][i], d = static_cast<double>(estimates[k][i]) - r;
      es += r * r;
      ee += d * d;
    }
  }
  Require(es >= kEps, ErrorCode::kAllReferencesSilent,
          "sa_sdr_loss: every reference in the batch is silent");
  if (grads) {
    grads->resize(estimates.size());
    const double c = detail::kDbPerNeper * 2.0 / (ee + eps);
    for (size_t k = 0; k < estimates.size(); ++k) {
      auto &g = (*grads)[k];
      g.resize(estimates[k].size());
      for (size_t i = 0; i < g.size(); ++i)
        g[i] = static_cast<T>(c * (static_cast<double>(estimates[k][i]) - references[k][i]));
    }
  }
  return static_cast<T>(10.0 * std::log10(ee + eps) - 10.0 * std::log10(es + eps));
}

/// Per-scenario view of one SADL evaluation.
struct SadlBreakdown {
  double value = 0.0;
  std::array<double, kNumScenarios> class_mean{};  // unweighted, by Scenario
  std::array<int, kNumScenarios> class_segments{};
};

/// Scenario-aware differentiated loss: SDR terms on SQ/SS segments, output
/// energy terms on QQ/QS segments, averaged per scenario and combined with
/// the weights. Absent scenarios contribute nothing.
template <typename T>
SadlBreakdown SadlLossDetailed(std::span<const T> estimate, std::span<const T> reference,
                               const ScenarioSegmentation &seg, const SadlWeights &w,
                               double eps = kEps, std::vector<T> *grad = nullptr) {
  Require(!seg.segments.empty(), ErrorCode::kEmptySegmentation, "sadl_loss: no segments");
  Require(estimate.size() == reference.size() && seg.size() == estimate.size(),
          ErrorCode::kLengthMismatch, "sadl_loss: segmentation does not cover the signals");
  const auto segments = SadlSegments(seg);
  SadlBreakdown out;
  for (const auto &s : segments) ++out.class_segments[static_cast<int>(s.label)];
  const std::array<double, kNumScenarios> weight = {w.qq, w.sq, w.qs, w.ss};
  if (grad) grad->assign(estimate.size(), T(0));
  T *g = grad ? grad->data() : nullptr;
  for (const auto &s : segments) {
    const int c = static_cast<int>(s.label);
    const double scale = weight[c] / out.class_segments[c];
    const double term =
        TargetSpeaking(s.label)
            ? detail::SdrTerm(estimate, reference, s.start, s.end, eps, scale, g)
            : detail::EnergyTerm(estimate, s.start, s.end, eps, scale, g);
    out.class_mean[c] += term / out.class_segments[c];
  }
  for (int c = 0; c < kNumScenarios; ++c)
    if (out.class_segments[c] > 0) out.value += weight[c] * out.class_mean[c];
  return out;
}

template <typename T>
T SadlLoss(std::span<const T> estimate, std::span<const T> reference,
           const ScenarioSegmentation &seg, const SadlWeights &w, double eps = kEps,
           std::vector<T> *grad = nullptr) {
  return static_cast<T>(SadlLossDetailed(estimate, reference, seg, w, eps, grad).value);
}

}  // namespace aex

#endif  // AEX_LOSSES_LOSSES_H_
