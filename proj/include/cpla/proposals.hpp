// SPDX-License-Identifier: Apache-2.0
/**
 * @file   proposals.hpp
 * @brief  Cascade region proposal machinery.
 *
 * Anchor generation, a two-stage cascade where the first stage's regressed
 * proposals are the second stage's anchors, IoU-based training sample
 * assignment with ratio-balanced mini-batches, and recall-vs-IoU curves.
 * Each stage's scorer and regressor is a plain callable so that learned
 * networks and synthetic oracles plug in the same way.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cpla/geometry.hpp"

namespace cpla::proposals {

using geometry::BoundingBox;
using geometry::BoxDelta;
using geometry::ScoredBox;

struct AnchorConfig {
  double stride = 16.0;
  std::vector<double> scales{128.0, 256.0, 512.0};
  /// h/w ratios
  std::vector<double> aspect_ratios{0.5, 1.0, 2.0};

  void validate() const;
};

/**
 * One anchor per (grid cell, scale, ratio) on a ceil(W/stride) x
 * ceil(H/stride) grid; cell (i, j) is centered at ((i+0.5)*stride,
 * (j+0.5)*stride). Anchors are not clipped. Order: row, column, scale,
 * ratio.
 */
std::vector<BoundingBox> generate_anchors(const AnchorConfig &cfg, double image_width,
                                          double image_height);

/// One cascade stage: objectness in [0,1] and a regression delta per input box.
struct ProposalStage {
  std::function<double(const BoundingBox &)> scorer;
  std::function<BoxDelta(const BoundingBox &)> regressor;
};

ProposalStage identity_stage(std::function<double(const BoundingBox &)> scorer);

struct CascadeConfig {
  double image_width = 0.0;
  double image_height = 0.0;
  std::size_t top_n = 300;
  /// Suppression applied to stage outputs before truncation to top_n.
  double nms_threshold = 0.7;
  bool nms_between_stages = true;
};

/**
 * Single RPN stage: score and regress every input box, clip to the image,
 * drop degenerate results, suppress and keep the top_n by score.
 */
std::vector<ScoredBox> run_stage(std::span<const BoundingBox> inputs,
                                 const ProposalStage &stage, const CascadeConfig &cfg);

/**
 * Two-stage cascade. Survivors of stage a become stage b's anchors; the
 * output boxes are stage b regressions scored by stage b only, clipped and
 * sorted by descending score.
 */
std::vector<ScoredBox> cascade_refine(std::span<const BoundingBox> anchors,
                                      const ProposalStage &stage_a,
                                      const ProposalStage &stage_b, const CascadeConfig &cfg);

/**
 * Synthetic stage that moves every box half way (in delta space) towards
 * its best-overlapping ground truth and scores it by that overlap. Boxes
 * that touch no ground truth are left in place with score 0.
 */
ProposalStage error_halving_stage(std::vector<BoundingBox> ground_truths);

enum class SampleLabel : std::uint8_t { kNegative, kIgnored, kPositive };

struct SampleAssignment {
  std::vector<SampleLabel> labels;
  /// Ground-truth index for positives, -1 otherwise.
  std::vector<int> matched_gt;

  std::size_t count(SampleLabel label) const;
};

/**
 * Max-IoU labeling: IoU > pos_threshold is positive, IoU < neg_threshold is
 * negative, anything in between is ignored. Every ground truth additionally
 * forces its highest-IoU candidate (lowest index on ties, IoU > 0) to be a
 * positive matched to it.
 */
SampleAssignment assign_samples(std::span<const BoundingBox> candidates,
                                std::span<const BoundingBox> ground_truths,
                                double pos_threshold = 0.7, double neg_threshold = 0.3);

struct MinibatchConfig {
  std::size_t max_size = 128;
  double ratio_min = 0.8;
  double ratio_max = 1.2;
};

struct Minibatch {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;

  bool empty() const { return positives.empty() && negatives.empty(); }
  std::size_t size() const { return positives.size() + negatives.size(); }
};

/**
 * Draw a class-balanced mini-batch. Picks the count pair (p, n) whose ratio
 * p/n lies in [ratio_min, ratio_max] and is closest to 1 (clamped into the
 * range), breaking ties by the larger batch, then samples uniformly without
 * replacement. Returns an empty batch when either class is empty or no
 * admissible pair exists. Selected indices are sorted ascending.
 */
Minibatch sample_minibatch(const SampleAssignment &assignment, const MinibatchConfig &cfg,
                           std::uint64_t seed);

struct RecallPoint {
  double threshold = 0.0;
  double recall = 0.0;
};

/**
 * Fraction of ground-truth boxes covered by at least one proposal of the
 * same image with IoU >= threshold. Thresholds must be ascending in [0,1].
 * Throws std::invalid_argument when there are no ground truths at all.
 */
std::vector<RecallPoint> recall_at_iou(std::span<const std::vector<BoundingBox>> proposals,
                                       std::span<const std::vector<BoundingBox>> ground_truths,
                                       std::span<const double> thresholds);

/// Recall curves of a one-stage and a two-stage error-halving cascade.
struct CascadeRecall {
  std::vector<RecallPoint> one_stage;
  std::vector<RecallPoint> two_stage;
};

/**
 * Runs both cascades over the anchors of every image, with the oracle
 * regressor built from that image's ground truths.
 */
CascadeRecall oracle_cascade_recall(std::span<const std::vector<BoundingBox>> ground_truths,
                                    const AnchorConfig &anchors, const CascadeConfig &cfg,
                                    std::span<const double> thresholds);

} // namespace cpla::proposals
