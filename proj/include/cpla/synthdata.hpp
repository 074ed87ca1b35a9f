// SPDX-License-Identifier: Apache-2.0
/**
 * @file   synthdata.hpp
 * @brief  Synthetic scenes and a noisy detector standing in for the CNNs.
 *
 * A scene is a set of actors moving with (optionally jittered) constant
 * velocity. The oracle turns per-frame proposals into scored class boxes:
 * an actor is detected only when some proposal overlaps it enough, which
 * is what makes proposal quality (and anticipation) matter downstream.
 * Every random draw comes from a stream keyed on (seed, purpose, frame), so
 * results are reproducible and independent of call order.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpla/anticipation.hpp"
#include "cpla/linking.hpp"

namespace cpla::synth {

using anticipation::Motion;
using geometry::BoundingBox;
using linking::ActionTube;
using linking::FrameDetections;

struct ActorSpec {
  int class_id = 0;
  int entry_frame = 0;
  /// Inclusive; clamped to the last frame of the scene.
  int exit_frame = 0;
  /// Box at entry_frame.
  BoundingBox box;
  /// Mean displacement per frame.
  Motion velocity;
  /// Per-frame, per-axis Gaussian jitter added to the displacement.
  double velocity_noise = 0.0;
};

struct DetectorNoise {
  double loc_sigma = 0.0;
  double tp_score_mean = 1.0;
  double tp_score_sigma = 0.0;
  double fp_score_mean = 0.3;
  double fp_score_sigma = 0.0;
  double miss_rate = 0.0;
  /// Mean number of false positives per frame (Poisson).
  double fp_rate = 0.0;
  double fp_min_size = 16.0;
  double fp_max_size = 96.0;
};

/// Stand-in for the proposal network.
struct ProposalNoise {
  /// Probability that an actor gets no proposal in a frame.
  double miss_rate = 0.0;
  /// Per-corner Gaussian jitter of the proposal around the actor box.
  double jitter_sigma = 0.0;
  /// Random background proposals per frame.
  int background = 0;
  /// Minimum proposal IoU for the detector to find an actor.
  double cover_iou = 0.5;
};

struct SceneSpec {
  std::string video_id = "scene";
  double width = 320.0;
  double height = 240.0;
  int num_frames = 1;
  int num_classes = 1;
  std::vector<ActorSpec> actors;
  DetectorNoise detector;
  ProposalNoise proposals;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument describing the first violation.
  void validate() const;
};

struct ActorTrack {
  std::size_t actor_index = 0;
  /// Visible, clipped ground-truth tube (score 1 per frame).
  ActionTube tube;
  /// Displacement of the actor from each tube frame to the next.
  std::vector<Motion> motion;
};

struct Scene {
  SceneSpec spec;
  std::vector<ActorTrack> actors;

  std::vector<ActionTube> ground_truth() const;
  /// Ground-truth boxes at a frame, in actor order.
  std::vector<BoundingBox> boxes_at(int frame) const;
  /**
   * Mean motion under a box: displacements of actors present at the frame,
   * weighted by their intersection with the box. Zero over background.
   */
  Motion motion_at(int frame, const BoundingBox &box) const;
};

/// Throws std::invalid_argument for an invalid spec or an actor never visible.
Scene generate_scene(const SceneSpec &spec);

class DetectionOracle {
public:
  explicit DetectionOracle(const Scene &scene);

  /// Jittered actor boxes (subject to proposal misses) plus background boxes.
  std::vector<BoundingBox> proposals(int frame) const;

  /**
   * Scored class boxes for a frame. Each actor is found when a proposal
   * covers it (IoU >= cover_iou) and it survives the detector miss draw;
   * its box is the truth with Gaussian corner noise. False positives are
   * added independently. Detections carry motion descriptors.
   */
  FrameDetections detect(int frame, std::span<const BoundingBox> proposals) const;

private:
  const Scene &scene_;
};

/// detect() on every frame with the ground truth as proposals.
std::vector<FrameDetections> render_detections(const Scene &scene);

} // namespace cpla::synth
