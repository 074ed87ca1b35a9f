// SPDX-License-Identifier: Apache-2.0
/**
 * @file   anticipation.hpp
 * @brief  Location anticipation: predicting where detections at frame t-K
 *         will be at frame t.
 *
 * The regressor is an affine map from a per-detection feature (normalized
 * box geometry plus a motion descriptor) to a BoxDelta, trained with a
 * smooth-L1 regression loss over positive detections. Two baselines are
 * provided: forwarding t-K boxes unchanged (zero motion) and no
 * anticipation at all.
 */
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpla/geometry.hpp"

namespace cpla::anticipation {

using geometry::BoundingBox;
using geometry::BoxDelta;

enum class Strategy : std::uint8_t { kNone, kNonMotion, kTrainedLan };

std::string_view to_string(Strategy s);
/// Accepts "none", "non-motion" and "lan". Throws std::invalid_argument.
Strategy parse_strategy(std::string_view name);

/// Mean displacement in pixels per frame.
struct Motion {
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(const Motion &, const Motion &) = default;
};

/// A detection as seen by the anticipation model.
struct LanInput {
  BoundingBox box;
  Motion motion;
};

inline constexpr std::size_t kFeatureDim = 6;
using FeatureVector = std::array<double, kFeatureDim>;

/**
 * (cx/W, cy/H, log w, log h, dx/w, dy/h). The motion entries are expressed
 * in box widths/heights per frame, which is the unit the regression target
 * uses. Requires a box with positive area.
 */
FeatureVector lan_feature(const LanInput &input, double image_width, double image_height);

struct LanModel {
  int gap = 1;
  /// weights[c][f]: output coordinate c (tx, ty, tw, th) from feature f.
  std::array<FeatureVector, 4> weights{};
  std::array<double, 4> bias{};
  /// Features are standardized as (f - mean) / scale before the affine map.
  FeatureVector feature_mean{};
  FeatureVector feature_scale{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

  BoxDelta predict(const FeatureVector &raw_feature) const;
  bool is_finite() const;
};

double smooth_l1(double x);
double smooth_l1_derivative(double x);

/**
 * (1/N) * sum_i label_i * sum_c smooth_l1(pred_i[c] - target_i[c]), with N
 * the number of boxes. Throws std::invalid_argument on empty or mismatched
 * input.
 */
double lan_loss(std::span<const BoxDelta> predicted, std::span<const BoxDelta> target,
                std::span<const std::uint8_t> labels);

/// Gradient of lan_loss with respect to each predicted delta.
std::vector<BoxDelta> lan_loss_gradient(std::span<const BoxDelta> predicted,
                                        std::span<const BoxDelta> target,
                                        std::span<const std::uint8_t> labels);

/// One training image: detections at t-K and the ground truth at t.
struct LanFrame {
  double image_width = 0.0;
  double image_height = 0.0;
  std::vector<LanInput> detections;
  std::vector<BoundingBox> ground_truths;
};

struct LanTrainingConfig {
  int gap = 8;
  int epochs = 400;
  double learning_rate = 0.2;
  double pos_threshold = 0.7;
  double neg_threshold = 0.3;
  double init_sigma = 0.01;
  std::uint64_t seed = 0;
};

/**
 * Full-batch training objective: mean over frames of the per-frame
 * lan_loss, with positives assigned by IoU against the frame-t truth
 * (best-candidate override included). Degenerate detections are skipped.
 */
class LanObjective {
public:
  struct Gradient {
    std::array<FeatureVector, 4> weights{};
    std::array<double, 4> bias{};
  };

  LanObjective(std::span<const LanFrame> frames, const LanTrainingConfig &cfg);

  /// Mean/scale over every usable detection feature.
  void fit_normalization(LanModel &model) const;

  double loss(const LanModel &model) const;
  double loss_and_gradient(const LanModel &model, Gradient &grad) const;

  std::size_t positive_count() const { return positives_; }
  std::size_t frame_count() const { return frames_.size(); }

private:
  struct Frame {
    std::vector<FeatureVector> features;
    std::vector<BoxDelta> targets;
    std::vector<std::uint8_t> labels;
  };
  std::vector<Frame> frames_;
  std::size_t positives_ = 0;
};

struct LanTrainingResult {
  LanModel model;
  /// Loss before the first update followed by the loss after each epoch.
  std::vector<double> loss_history;
};

/// Throws std::invalid_argument when no frame contributes a positive.
LanTrainingResult train_lan(std::span<const LanFrame> frames, const LanTrainingConfig &cfg);

/**
 * Anticipated frame-t boxes for detections at t-K, clipped to the image.
 * kNone yields nothing; kNonMotion forwards the boxes; kTrainedLan applies
 * the model (which must be non-null). Degenerate input boxes are forwarded
 * unchanged by the model path.
 */
std::vector<BoundingBox> anticipate(Strategy strategy, const LanModel *model,
                                    std::span<const LanInput> detections, double image_width,
                                    double image_height);

/// Proposals followed by every anticipated box not already present.
std::vector<BoundingBox> augment_proposals(std::span<const BoundingBox> proposals,
                                           std::span<const BoundingBox> anticipated);

} // namespace cpla::anticipation
