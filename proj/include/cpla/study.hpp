// SPDX-License-Identifier: Apache-2.0
/**
 * @file   study.hpp
 * @brief  Anticipation-strategy study: runs the full detect, link, trim,
 *         evaluate pipeline on synthetic scenes for every (strategy, gap,
 *         seed) cell and reports tube mAP per threshold.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpla/anticipation.hpp"
#include "cpla/linking.hpp"
#include "cpla/synthdata.hpp"
#include "cpla/trimming.hpp"

namespace cpla::evaluation {

using anticipation::Strategy;

struct PipelineParams {
  linking::ExtractionParams extraction;
  trimming::PenaltyMode trim_mode = trimming::PenaltyMode::kAbsolute;
};

/**
 * Frame-by-frame detection. Each frame's proposals are the oracle's
 * proposals, augmented (unless the strategy is kNone) with boxes
 * anticipated from the detections `gap` frames earlier.
 */
std::vector<linking::FrameDetections> detect_video(const synth::Scene &scene, Strategy strategy,
                                                   const anticipation::LanModel *model, int gap);

/// (detections at t - gap, truth at t) pairs for every frame t >= gap.
std::vector<anticipation::LanFrame> lan_training_frames(const synth::Scene &scene,
                                                        std::span<const linking::FrameDetections> video,
                                                        int gap);

/**
 * extract_tubes followed by trimming of every multi-frame tube. Single-frame
 * tubes pass through unchanged.
 */
std::vector<linking::ActionTube> link_and_trim(std::span<const linking::FrameDetections> video,
                                               const PipelineParams &params,
                                               const trimming::TrimmingParams &lengths,
                                               const std::string &video_id);

struct StudyConfig {
  /// Scene templates; each (seed, scene) pair gets its own derived rng seed.
  std::vector<synth::SceneSpec> scenes;
  std::vector<Strategy> strategies{Strategy::kNone, Strategy::kNonMotion, Strategy::kTrainedLan};
  std::vector<int> gaps{2, 8, 16};
  std::vector<double> deltas{0.05, 0.1, 0.2, 0.3};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  /// Training replicas per scene template (LAN and average lengths).
  int training_replicas = 2;
  PipelineParams pipeline;
  anticipation::LanTrainingConfig lan;
};

struct StudyRow {
  Strategy strategy = Strategy::kNone;
  /// 0 for strategies without a gap.
  int gap = 0;
  double delta = 0.0;
  double map = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;

  std::optional<double> lookup(Strategy strategy, int gap, double delta) const;
  /// Header `strategy,K,delta,mAP`; K is `-` for the non-anticipation rows.
  std::string to_csv() const;
};

bool uses_gap(Strategy s);

/// Seed of the scene instance for (study seed, scene index, replica); replica 0 is the test instance.
std::uint64_t derive_seed(std::uint64_t seed, std::size_t scene, std::size_t replica);

/// Tube mAP of one strategy/gap/seed cell over every scene template.
std::vector<double> run_study_cell(const StudyConfig &cfg, Strategy strategy, int gap,
                                   std::uint64_t seed);

/// Throws std::invalid_argument when there are no scenes or no seeds.
StudyReport run_strategy_study(const StudyConfig &cfg);

/**
 * Standard moving-actor fixture: `count` scenes of several actors drifting
 * at 1-4 px/frame with moderate detector noise and proposal misses.
 * `motion_scale` multiplies every velocity (0 gives a static fixture).
 */
std::vector<synth::SceneSpec> drifting_scene_fixture(std::size_t count, std::uint64_t seed,
                                                     double motion_scale = 1.0);

} // namespace cpla::evaluation
