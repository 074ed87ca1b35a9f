// SPDX-License-Identifier: Apache-2.0
/**
 * @file   linking.hpp
 * @brief  Per-class detection linking into action tubes.
 *
 * Consecutive-frame detections of one class are joined by the score
 *
 *   S(d_t, d_t+1) = (1 - beta) * (s(d_t) + s(d_t+1)) + beta * IoU(d_t, d_t+1)
 *
 * and the path maximizing the summed S over a run of frames is found by
 * Viterbi dynamic programming. Several tubes per class are extracted by
 * repeatedly taking the best path and removing its detections.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpla/anticipation.hpp"
#include "cpla/geometry.hpp"

namespace cpla::linking {

using geometry::BoundingBox;

struct Detection {
  BoundingBox box;
  int class_id = 0;
  double score = 0.0;
  /// Motion descriptor under the box, when the producer supplies one.
  std::optional<anticipation::Motion> motion;
};

struct FrameDetections {
  int frame_index = 0;
  std::vector<Detection> detections;
};

struct LinkingParams {
  double beta = 0.7;
  void validate() const;
};

/// A contiguous per-class sequence of boxes, one per frame in [start_frame, end_frame].
struct ActionTube {
  std::string video_id;
  int class_id = 0;
  int start_frame = 0;
  int end_frame = 0;
  std::vector<BoundingBox> boxes;
  std::vector<double> scores;
  double tube_score = 0.0;

  std::size_t length() const { return boxes.size(); }
  /// Box at an absolute frame index inside the tube.
  const BoundingBox &box_at(int frame) const {
    return boxes[static_cast<std::size_t>(frame - start_frame)];
  }
  /// Throws std::invalid_argument when sizes or frame range disagree.
  void validate() const;
};

/// Mean of the per-frame scores.
double mean_score(std::span<const double> scores);

/// Throws std::invalid_argument on a class mismatch.
double linking_score(const Detection &current, const Detection &next, const LinkingParams &params);

/// Link scores between consecutive frames of a tube (length - 1 values).
std::vector<double> tube_link_scores(const ActionTube &tube, const LinkingParams &params);

struct LinkedPath {
  /// One detection index per frame of the run.
  std::vector<std::size_t> indices;
  /// Sum of link scores; the detection score for a single-frame run.
  double score = 0.0;
};

/**
 * Exact maximum-score path through a run of consecutive frames holding
 * detections of a single class. Ties go to the lower detection index.
 * Throws std::invalid_argument for an empty run or an empty frame.
 */
LinkedPath viterbi_link(std::span<const std::vector<Detection>> run, const LinkingParams &params);

struct ExtractionParams {
  LinkingParams linking;
  std::size_t max_tubes = 10;
  /// Extraction stops once the best path's mean per-link score falls below this.
  double min_path_score = 0.1;
};

/**
 * All tubes of every class in a video, ordered by (class_id, start_frame,
 * end_frame). A class is split into runs of consecutive frame indices that
 * contain it; within each class the highest-scoring path over all runs is
 * taken repeatedly, its detections removed and the run re-split, until
 * max_tubes is reached or the mean link score drops below min_path_score.
 */
std::vector<ActionTube> extract_tubes(std::span<const FrameDetections> video,
                                      const ExtractionParams &params,
                                      const std::string &video_id = {});

} // namespace cpla::linking
