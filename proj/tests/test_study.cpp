// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <stdexcept>

#include "cpla/evaluation.hpp"
#include "cpla/study.hpp"

using namespace cpla::evaluation;
using cpla::anticipation::Strategy;
using cpla::synth::SceneSpec;

namespace {

SceneSpec static_spec(double proposal_miss) {
  SceneSpec spec;
  spec.video_id = "static";
  spec.num_frames = 30;
  spec.num_classes = 2;
  spec.seed = 3;
  spec.actors.push_back({0, 0, 29, {40, 40, 90, 120}, {0, 0}, 0.0});
  spec.actors.push_back({1, 5, 25, {180, 60, 230, 150}, {0, 0}, 0.0});
  spec.proposals.miss_rate = proposal_miss;
  return spec;
}

std::size_t detection_count(const std::vector<cpla::linking::FrameDetections> &video) {
  std::size_t n = 0;
  for (const auto &f : video)
    n += f.detections.size();
  return n;
}

} // namespace

TEST(DeriveSeed, DeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(DetectVideo, NoiselessSceneDetectsEveryActor) {
  const auto scene = cpla::synth::generate_scene(static_spec(0.0));
  const auto video = detect_video(scene, Strategy::kNone, nullptr, 0);
  ASSERT_EQ(video.size(), 30u);
  for (int f = 0; f < 30; ++f)
    EXPECT_EQ(video[static_cast<std::size_t>(f)].detections.size(), scene.boxes_at(f).size());
}

TEST(DetectVideo, ForwardedBoxesRecoverMissedProposals) {
  const auto scene = cpla::synth::generate_scene(static_spec(0.5));
  const auto none = detect_video(scene, Strategy::kNone, nullptr, 0);
  const auto still = detect_video(scene, Strategy::kNonMotion, nullptr, 2);
  EXPECT_GT(detection_count(still), detection_count(none));
  EXPECT_THROW(detect_video(scene, Strategy::kNonMotion, nullptr, 0), std::invalid_argument);
}

TEST(LanTrainingFrames, PairsEarlierDetectionsWithLaterTruth) {
  const auto scene = cpla::synth::generate_scene(static_spec(0.0));
  const auto video = detect_video(scene, Strategy::kNone, nullptr, 0);
  const auto frames = lan_training_frames(scene, video, 4);
  ASSERT_EQ(frames.size(), 26u);
  EXPECT_EQ(frames[0].detections.size(), video[0].detections.size());
  EXPECT_EQ(frames[0].ground_truths, scene.boxes_at(4));
}

TEST(LinkAndTrim, NoiselessPipelineRecoversTruth) {
  const auto scene = cpla::synth::generate_scene(static_spec(0.0));
  const auto video = detect_video(scene, Strategy::kNone, nullptr, 0);
  const auto truth = scene.ground_truth();
  const auto lengths = cpla::trimming::avg_class_length(truth);
  const auto tubes = link_and_trim(video, {}, lengths, scene.spec.video_id);
  const auto result = mean_ap(tubes, truth, kDefaultDeltas);
  for (const auto &[delta, map] : result.map_by_delta)
    EXPECT_DOUBLE_EQ(map, 1.0) << delta;
}

TEST(StudyReport, CsvLayout) {
  StudyReport report;
  report.rows = {{Strategy::kNone, 0, 0.2, 0.5}, {Strategy::kTrainedLan, 8, 0.2, 0.75}};
  EXPECT_EQ(report.to_csv(), "strategy,K,delta,mAP\nnone,-,0.2,0.5\nlan,8,0.2,0.75\n");
  EXPECT_EQ(report.lookup(Strategy::kTrainedLan, 8, 0.2), 0.75);
  EXPECT_EQ(report.lookup(Strategy::kNone, 16, 0.2), 0.5);
  EXPECT_FALSE(report.lookup(Strategy::kNonMotion, 8, 0.2).has_value());
}

TEST(RunStrategyStudy, RowsCoverEveryCellAndAreDeterministic) {
  StudyConfig cfg;
  cfg.scenes = drifting_scene_fixture(2, 5);
  cfg.gaps = {2, 8};
  cfg.deltas = {0.1, 0.2};
  cfg.seeds = {1, 2};
  cfg.training_replicas = 1;
  cfg.lan.epochs = 50;
  const auto a = run_strategy_study(cfg);
  // none, then non-motion and lan at each gap; one row per delta.
  EXPECT_EQ(a.rows.size(), (1 + 2 * 2) * 2u);
  for (const auto &row : a.rows) {
    EXPECT_GE(row.map, 0.0);
    EXPECT_LE(row.map, 1.0);
  }
  EXPECT_EQ(a.to_csv(), run_strategy_study(cfg).to_csv());
}

TEST(RunStrategyStudy, RejectsEmptyConfig) {
  StudyConfig cfg;
  EXPECT_THROW(run_strategy_study(cfg), std::invalid_argument);
  cfg.scenes = drifting_scene_fixture(1, 1);
  cfg.seeds.clear();
  EXPECT_THROW(run_strategy_study(cfg), std::invalid_argument);
}

TEST(DriftingFixture, ValidScenesWithScaledMotion) {
  const auto specs = drifting_scene_fixture(5, 9);
  ASSERT_EQ(specs.size(), 5u);
  for (const auto &s : specs) {
    EXPECT_NO_THROW(cpla::synth::generate_scene(s));
    for (const auto &a : s.actors) {
      const double speed = std::hypot(a.velocity.dx, a.velocity.dy);
      EXPECT_GE(speed, 1.0 - 1e-12);
      EXPECT_LE(speed, 4.0 + 1e-12);
    }
  }
  for (const auto &s : drifting_scene_fixture(3, 9, 0.0))
    for (const auto &a : s.actors)
      EXPECT_EQ(a.velocity, (cpla::anticipation::Motion{}));
  EXPECT_EQ(drifting_scene_fixture(2, 4)[1].actors[0].box, drifting_scene_fixture(2, 4)[1].actors[0].box);
}
