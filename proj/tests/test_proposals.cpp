// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "cpla/proposals.hpp"

using namespace cpla::proposals;
using cpla::geometry::iou;

namespace {

BoundingBox random_box(std::mt19937_64 &rng, double extent) {
  std::uniform_real_distribution<double> pos(0.0, extent * 0.7);
  std::uniform_real_distribution<double> size(4.0, extent * 0.3);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + size(rng), y + size(rng)};
}

SampleAssignment make_pool(std::size_t pos, std::size_t neg, std::size_t ignored = 0) {
  SampleAssignment a;
  a.labels.insert(a.labels.end(), pos, SampleLabel::kPositive);
  a.labels.insert(a.labels.end(), neg, SampleLabel::kNegative);
  a.labels.insert(a.labels.end(), ignored, SampleLabel::kIgnored);
  a.matched_gt.assign(a.labels.size(), -1);
  return a;
}

} // namespace

TEST(GenerateAnchors, CountFollowsGridTimesShapes) {
  const auto anchors = generate_anchors(AnchorConfig{}, 64, 64);
  EXPECT_EQ(anchors.size(), 4u * 4u * 9u);
}

TEST(GenerateAnchors, PartialCellsRoundUp) {
  AnchorConfig cfg;
  cfg.scales = {32};
  cfg.aspect_ratios = {1};
  EXPECT_EQ(generate_anchors(cfg, 65, 33).size(), 5u * 3u);
}

TEST(GenerateAnchors, FirstCellCenter) {
  const auto anchors = generate_anchors(AnchorConfig{}, 64, 64);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_DOUBLE_EQ(anchors[k].center_x(), 8.0);
    EXPECT_DOUBLE_EQ(anchors[k].center_y(), 8.0);
  }
}

TEST(GenerateAnchors, UnitRatioIsSquare) {
  AnchorConfig cfg;
  cfg.scales = {40};
  cfg.aspect_ratios = {1};
  const auto anchors = generate_anchors(cfg, 16, 16);
  ASSERT_EQ(anchors.size(), 1u);
  EXPECT_EQ(anchors[0], (BoundingBox{-12, -12, 28, 28}));
}

TEST(GenerateAnchors, AspectRatioIsHeightOverWidth) {
  AnchorConfig cfg;
  cfg.scales = {100};
  cfg.aspect_ratios = {2};
  const auto a = generate_anchors(cfg, 16, 16).front();
  EXPECT_NEAR(a.height() / a.width(), 2.0, 1e-12);
  EXPECT_NEAR(a.area(), 100.0 * 100.0, 1e-9);
}

TEST(GenerateAnchors, RejectsBadConfig) {
  AnchorConfig cfg;
  cfg.stride = 0;
  EXPECT_THROW(generate_anchors(cfg, 64, 64), std::invalid_argument);
  cfg = {};
  cfg.scales.clear();
  EXPECT_THROW(generate_anchors(cfg, 64, 64), std::invalid_argument);
  EXPECT_THROW(generate_anchors(AnchorConfig{}, 0, 64), std::invalid_argument);
}

TEST(CascadeRefine, IdentityStagesReturnTopScoredAnchors) {
  const std::vector<BoundingBox> anchors{
      {0, 0, 10, 10}, {50, 50, 60, 60}, {20, 20, 30, 30}, {70, 0, 80, 10}};
  const std::vector<double> scores{0.2, 0.9, 0.5, 0.7};
  auto scorer = [&](const BoundingBox &b) {
    for (std::size_t i = 0; i < anchors.size(); ++i)
      if (anchors[i] == b)
        return scores[i];
    return 0.0;
  };
  CascadeConfig cfg{100, 100, 3, 0.7, true};
  const auto out = cascade_refine(anchors, identity_stage(scorer), identity_stage(scorer), cfg);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].box, anchors[1]);
  EXPECT_EQ(out[1].box, anchors[3]);
  EXPECT_EQ(out[2].box, anchors[2]);

  // Same as a single stage top-n selection.
  const auto single = run_stage(anchors, identity_stage(scorer), cfg);
  ASSERT_EQ(single.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(single[i].box, out[i].box);
    EXPECT_EQ(single[i].score, out[i].score);
  }
}

TEST(CascadeRefine, ScoresComeFromSecondStage) {
  const std::vector<BoundingBox> anchors{{0, 0, 10, 10}, {50, 50, 60, 60}};
  auto by_x = [](const BoundingBox &b) { return b.x1 / 100.0; };
  auto by_neg_x = [](const BoundingBox &b) { return 1.0 - b.x1 / 100.0; };
  CascadeConfig cfg{100, 100, 10, 0.7, true};
  const auto out = cascade_refine(anchors, identity_stage(by_x), identity_stage(by_neg_x), cfg);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].box, anchors[0]);
  EXPECT_DOUBLE_EQ(out[0].score, 1.0);
  EXPECT_DOUBLE_EQ(out[1].score, 0.5);
}

TEST(CascadeRefine, EmptyAnchorsGiveEmptyOutput) {
  const std::vector<BoundingBox> none;
  auto s = identity_stage([](const BoundingBox &) { return 1.0; });
  EXPECT_TRUE(cascade_refine(none, s, s, CascadeConfig{100, 100, 300, 0.7, true}).empty());
}

TEST(CascadeRefine, RejectsZeroTopN) {
  const std::vector<BoundingBox> anchors{{0, 0, 10, 10}};
  auto s = identity_stage([](const BoundingBox &) { return 1.0; });
  EXPECT_THROW(cascade_refine(anchors, s, s, CascadeConfig{100, 100, 0, 0.7, true}),
               std::invalid_argument);
}

TEST(CascadeRefine, ErrorHalvingStagesShrinkCenterError) {
  const BoundingBox gt{100, 100, 164, 164};
  const std::vector<BoundingBox> anchors{{108, 100, 172, 164}};
  const auto stage = error_halving_stage({gt});
  CascadeConfig cfg{320, 240, 300, 0.7, true};

  const auto one = run_stage(anchors, stage, cfg);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].box.center_x() - gt.center_x(), 4.0, 1e-9);

  const auto two = cascade_refine(anchors, stage, stage, cfg);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_NEAR(two[0].box.center_x() - gt.center_x(), 2.0, 1e-9);
  EXPECT_NEAR(two[0].box.center_y(), gt.center_y(), 1e-9);
}

TEST(CascadeRefine, OutputIsClippedToImage) {
  const std::vector<BoundingBox> anchors{{-20, -20, 40, 40}};
  auto s = identity_stage([](const BoundingBox &) { return 0.5; });
  const auto out = cascade_refine(anchors, s, s, CascadeConfig{30, 30, 10, 0.7, true});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, (BoundingBox{0, 0, 30, 30}));
}

TEST(CascadeRefine, DegenerateProposalsDropped) {
  const std::vector<BoundingBox> anchors{{200, 200, 220, 220}, {0, 0, 10, 10}};
  auto s = identity_stage([](const BoundingBox &) { return 0.5; });
  const auto out = cascade_refine(anchors, s, s, CascadeConfig{100, 100, 10, 0.7, true});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, (BoundingBox{0, 0, 10, 10}));
}

TEST(CascadeRefine, TwoStagesImproveHighIouRecall) {
  std::mt19937_64 rng(3);
  const auto anchors = generate_anchors(AnchorConfig{32, {48, 96, 192}, {0.5, 1, 2}}, 320, 240);
  std::vector<std::vector<BoundingBox>> one, two, gts;
  for (int img = 0; img < 50; ++img) {
    const BoundingBox gt = random_box(rng, 240);
    const auto stage = error_halving_stage({gt});
    CascadeConfig cfg{320, 240, 300, 0.7, true};
    std::vector<BoundingBox> a, b;
    for (const auto &p : run_stage(anchors, stage, cfg))
      a.push_back(p.box);
    for (const auto &p : cascade_refine(anchors, stage, stage, cfg))
      b.push_back(p.box);
    one.push_back(a);
    two.push_back(b);
    gts.push_back({gt});
  }
  const std::vector<double> thr{0.8};
  EXPECT_GE(recall_at_iou(two, gts, thr)[0].recall, recall_at_iou(one, gts, thr)[0].recall);
}

TEST(AssignSamples, HighOverlapIsPositive) {
  const std::vector<BoundingBox> gts{{0, 0, 10, 10}};
  // IoU 80/100 = 0.8
  const std::vector<BoundingBox> cands{{0, 0, 10, 8}, {50, 50, 60, 60}};
  const auto a = assign_samples(cands, gts);
  EXPECT_EQ(a.labels[0], SampleLabel::kPositive);
  EXPECT_EQ(a.matched_gt[0], 0);
  EXPECT_EQ(a.labels[1], SampleLabel::kNegative);
  EXPECT_EQ(a.matched_gt[1], -1);
}

TEST(AssignSamples, MidOverlapIgnoredUnlessBest) {
  const std::vector<BoundingBox> gts{{0, 0, 10, 10}};
  // IoU 0.9 then IoU 0.5
  const std::vector<BoundingBox> cands{{0, 0, 10, 9}, {0, 0, 10, 5}};
  const auto a = assign_samples(cands, gts);
  EXPECT_EQ(a.labels[0], SampleLabel::kPositive);
  EXPECT_EQ(a.labels[1], SampleLabel::kIgnored);
}

TEST(AssignSamples, BestCandidateForcedPositive) {
  const std::vector<BoundingBox> gts{{0, 0, 10, 10}, {100, 100, 110, 110}};
  // Both candidates below the positive threshold; each is its GT's best.
  const std::vector<BoundingBox> cands{{0, 0, 10, 5}, {100, 100, 105, 105}};
  const auto a = assign_samples(cands, gts);
  EXPECT_EQ(a.labels[0], SampleLabel::kPositive);
  EXPECT_EQ(a.matched_gt[0], 0);
  EXPECT_EQ(a.labels[1], SampleLabel::kPositive);
  EXPECT_EQ(a.matched_gt[1], 1);
}

TEST(AssignSamples, NoGroundTruthsAllNegative) {
  const std::vector<BoundingBox> cands{{0, 0, 10, 10}, {5, 5, 9, 9}};
  const auto a = assign_samples(cands, {});
  EXPECT_EQ(a.count(SampleLabel::kNegative), 2u);
}

TEST(AssignSamples, RejectsBadThresholds) {
  EXPECT_THROW(assign_samples({}, {}, 0.3, 0.7), std::invalid_argument);
  EXPECT_THROW(assign_samples({}, {}, 1.2, 0.3), std::invalid_argument);
}

TEST(AssignSamples, EveryOverlappedGroundTruthHasAPositive) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BoundingBox> gts, cands;
    for (int i = 0; i < 3; ++i)
      gts.push_back(random_box(rng, 100));
    for (int i = 0; i < 15; ++i)
      cands.push_back(random_box(rng, 100));
    const auto a = assign_samples(cands, gts);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      bool touched = false;
      for (const auto &c : cands)
        touched = touched || iou(c, gts[g]) > 0;
      if (!touched)
        continue;
      // The highest-overlap candidate of every touched ground truth is positive.
      std::size_t best = 0;
      for (std::size_t c = 1; c < cands.size(); ++c)
        if (iou(cands[c], gts[g]) > iou(cands[best], gts[g]))
          best = c;
      EXPECT_EQ(a.labels[best], SampleLabel::kPositive);
    }
    for (std::size_t c = 0; c < cands.size(); ++c) {
      double best = 0;
      for (const auto &g : gts)
        best = std::max(best, iou(cands[c], g));
      if (a.labels[c] == SampleLabel::kNegative)
        EXPECT_LT(best, 0.3);
    }
  }
}

TEST(SampleMinibatch, LargeBalancedPoolCappedAt128) {
  const auto batch = sample_minibatch(make_pool(200, 200), MinibatchConfig{}, 1);
  EXPECT_EQ(batch.positives.size(), 64u);
  EXPECT_EQ(batch.negatives.size(), 64u);
}

TEST(SampleMinibatch, FewPositivesBalancedNegatives) {
  const auto batch = sample_minibatch(make_pool(10, 1000), MinibatchConfig{}, 1);
  EXPECT_EQ(batch.positives.size(), 10u);
  EXPECT_EQ(batch.negatives.size(), 10u);
  for (std::size_t i : batch.positives)
    EXPECT_LT(i, 10u);
  for (std::size_t i : batch.negatives)
    EXPECT_GE(i, 10u);
}

TEST(SampleMinibatch, NoPositivesSkipsFrame) {
  EXPECT_TRUE(sample_minibatch(make_pool(0, 50), MinibatchConfig{}, 1).empty());
  EXPECT_TRUE(sample_minibatch(make_pool(0, 0, 5), MinibatchConfig{}, 1).empty());
}

TEST(SampleMinibatch, IgnoredNeverSelected) {
  const auto batch = sample_minibatch(make_pool(5, 5, 100), MinibatchConfig{}, 3);
  for (std::size_t i : batch.negatives)
    EXPECT_LT(i, 10u);
}

TEST(SampleMinibatch, NonUnitRatioRange) {
  MinibatchConfig cfg;
  cfg.ratio_min = 1.5;
  cfg.ratio_max = 2.0;
  const auto batch = sample_minibatch(make_pool(100, 100), cfg, 2);
  const double r = static_cast<double>(batch.positives.size()) / batch.negatives.size();
  EXPECT_GE(r, 1.5);
  EXPECT_LE(r, 2.0);
  EXPECT_LE(batch.size(), 128u);
}

TEST(SampleMinibatch, DeterministicGivenSeed) {
  const auto pool = make_pool(300, 300);
  EXPECT_EQ(sample_minibatch(pool, {}, 42).positives, sample_minibatch(pool, {}, 42).positives);
  EXPECT_NE(sample_minibatch(pool, {}, 42).positives, sample_minibatch(pool, {}, 43).positives);
}

TEST(SampleMinibatch, RatioAlwaysInRangeWhenFeasible) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> size(1, 400);
  for (int trial = 0; trial < 500; ++trial) {
    const auto batch = sample_minibatch(make_pool(size(rng), size(rng), size(rng)), {},
                                        static_cast<std::uint64_t>(trial));
    ASSERT_FALSE(batch.empty());
    EXPECT_LE(batch.size(), 128u);
    const double r = static_cast<double>(batch.positives.size()) / batch.negatives.size();
    EXPECT_GE(r, 0.8);
    EXPECT_LE(r, 1.2);
    EXPECT_EQ(std::set<std::size_t>(batch.positives.begin(), batch.positives.end()).size(),
              batch.positives.size());
  }
}

TEST(RecallAtIou, PerfectProposals) {
  const std::vector<std::vector<BoundingBox>> gts{{{0, 0, 10, 10}, {20, 20, 30, 40}}};
  const std::vector<double> thr{0.0, 0.5, 1.0};
  for (const auto &p : recall_at_iou(gts, gts, thr))
    EXPECT_DOUBLE_EQ(p.recall, 1.0);
}

TEST(RecallAtIou, EmptyProposals) {
  const std::vector<std::vector<BoundingBox>> gts{{{0, 0, 10, 10}}};
  const std::vector<std::vector<BoundingBox>> props{{}};
  const std::vector<double> thr{0.0, 0.5};
  for (const auto &p : recall_at_iou(props, gts, thr))
    EXPECT_DOUBLE_EQ(p.recall, 0.0);
}

TEST(RecallAtIou, NoGroundTruthIsError) {
  const std::vector<std::vector<BoundingBox>> gts{{}};
  const std::vector<double> thr{0.5};
  EXPECT_THROW(recall_at_iou(gts, gts, thr), std::invalid_argument);
}

TEST(RecallAtIou, RejectsUnsortedThresholds) {
  const std::vector<std::vector<BoundingBox>> gts{{{0, 0, 10, 10}}};
  const std::vector<double> thr{0.7, 0.5};
  EXPECT_THROW(recall_at_iou(gts, gts, thr), std::invalid_argument);
}

TEST(RecallAtIou, MatchesExhaustiveOracleAndIsMonotone) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> ngt(1, 5), nprop(0, 20);
  std::vector<double> thr;
  for (int i = 0; i <= 20; ++i)
    thr.push_back(i / 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<BoundingBox>> gts(3), props(3);
    for (int img = 0; img < 3; ++img) {
      const int g = ngt(rng), p = nprop(rng);
      for (int i = 0; i < g; ++i)
        gts[img].push_back(random_box(rng, 60));
      for (int i = 0; i < p; ++i)
        props[img].push_back(random_box(rng, 60));
    }
    const auto curve = recall_at_iou(props, gts, thr);
    for (std::size_t k = 0; k < thr.size(); ++k) {
      int covered = 0, total = 0;
      for (int img = 0; img < 3; ++img) {
        for (const auto &g : gts[img]) {
          ++total;
          for (const auto &p : props[img]) {
            const double v = iou(p, g);
            if (v > 0 && v >= thr[k]) {
              ++covered;
              break;
            }
          }
        }
      }
      EXPECT_DOUBLE_EQ(curve[k].recall, static_cast<double>(covered) / total);
      if (k > 0)
        EXPECT_LE(curve[k].recall, curve[k - 1].recall);
    }
  }
}
