// SPDX-License-Identifier: Apache-2.0
/**
 * @file   evaluation.hpp
 * @brief  Spatio-temporal tube overlap, average precision and mAP.
 *
 * Tube overlap is the temporal IoU of the frame ranges times the mean
 * per-frame box IoU over the frames both tubes cover. AP uses every-point
 * interpolation of the precision/recall curve.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cpla/linking.hpp"

namespace cpla::evaluation {

using linking::ActionTube;

inline const std::vector<double> kDefaultDeltas{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};

double temporal_iou(const ActionTube &a, const ActionTube &b);

/// 0 for tubes of different videos or temporally disjoint tubes.
double tube_iou(const ActionTube &a, const ActionTube &b);

struct MatchResult {
  /// Per prediction in ranked order: matched ground-truth index or -1.
  std::vector<int> matched_gt;
  /// Ranked order as indices into the prediction list.
  std::vector<std::size_t> order;
  std::vector<bool> gt_matched;
};

/**
 * Greedy matching in descending tube_score order (stable). A prediction is
 * a true positive when some unmatched ground truth of the same class and
 * video has tube_iou >= delta; it takes the highest-overlap such tube.
 */
MatchResult match_tubes(std::span<const ActionTube> predictions,
                        std::span<const ActionTube> ground_truths, double delta);

/// Every-point interpolated AP from a ranked true-positive sequence.
double ap_from_ranked_hits(std::span<const std::uint8_t> hits, std::size_t num_ground_truths);

/**
 * AP of one class. Predictions and ground truths of other classes are
 * ignored. Returns std::nullopt when the class has no ground truth.
 */
std::optional<double> average_precision(std::span<const ActionTube> predictions,
                                        std::span<const ActionTube> ground_truths, int class_id,
                                        double delta);

struct MapResult {
  std::map<double, double> map_by_delta;
  /// delta -> class -> AP for classes with ground truth.
  std::map<double, std::map<int, double>> ap_by_class;
};

/**
 * Unweighted mean of per-class AP over classes present in the ground truth.
 * Throws std::invalid_argument when there is no ground truth at all or a
 * delta is outside (0,1].
 */
MapResult mean_ap(std::span<const ActionTube> predictions, std::span<const ActionTube> ground_truths,
                  std::span<const double> deltas);

} // namespace cpla::evaluation
