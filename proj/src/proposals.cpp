// SPDX-License-Identifier: Apache-2.0
#include "cpla/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cpla::proposals {

using geometry::clip;
using geometry::decode_delta;
using geometry::encode_delta;
using geometry::iou;

void AnchorConfig::validate() const {
  if (!(stride > 0.0))
    throw std::invalid_argument("anchor stride must be positive");
  if (scales.empty() || aspect_ratios.empty())
    throw std::invalid_argument("anchor scales and aspect ratios must be non-empty");
  for (double s : scales)
    if (!(s > 0.0))
      throw std::invalid_argument("anchor scales must be positive");
  for (double r : aspect_ratios)
    if (!(r > 0.0))
      throw std::invalid_argument("anchor aspect ratios must be positive");
}

std::vector<BoundingBox> generate_anchors(const AnchorConfig &cfg, double image_width,
                                          double image_height) {
  cfg.validate();
  if (!(image_width > 0.0) || !(image_height > 0.0))
    throw std::invalid_argument("generate_anchors: image dimensions must be positive");

  const auto cols = static_cast<std::size_t>(std::ceil(image_width / cfg.stride));
  const auto rows = static_cast<std::size_t>(std::ceil(image_height / cfg.stride));

  // Shapes are shared by every cell.
  std::vector<std::pair<double, double>> shapes;
  for (double scale : cfg.scales) {
    for (double ratio : cfg.aspect_ratios) {
      const double r = std::sqrt(ratio);
      shapes.emplace_back(scale / r, scale * r);
    }
  }

  std::vector<BoundingBox> anchors;
  anchors.reserve(rows * cols * shapes.size());
  for (std::size_t j = 0; j < rows; ++j) {
    const double cy = (static_cast<double>(j) + 0.5) * cfg.stride;
    for (std::size_t i = 0; i < cols; ++i) {
      const double cx = (static_cast<double>(i) + 0.5) * cfg.stride;
      for (const auto &[w, h] : shapes)
        anchors.push_back(BoundingBox::from_center(cx, cy, w, h));
    }
  }
  return anchors;
}

ProposalStage identity_stage(std::function<double(const BoundingBox &)> scorer) {
  return {std::move(scorer), [](const BoundingBox &) { return BoxDelta{}; }};
}

namespace {

std::vector<ScoredBox> score_and_regress(std::span<const BoundingBox> inputs,
                                         const ProposalStage &stage,
                                         const CascadeConfig &cfg) {
  std::vector<ScoredBox> out;
  out.reserve(inputs.size());
  for (const auto &box : inputs) {
    const double score = stage.scorer(box);
    const BoundingBox moved =
        clip(decode_delta(box, stage.regressor(box)), cfg.image_width, cfg.image_height);
    if (moved.has_positive_area())
      out.push_back({moved, score});
  }
  return out;
}

void check_config(const CascadeConfig &cfg) {
  if (cfg.top_n == 0)
    throw std::invalid_argument("cascade: top_n must be positive");
  if (!(cfg.image_width > 0.0) || !(cfg.image_height > 0.0))
    throw std::invalid_argument("cascade: image dimensions must be positive");
}

std::vector<ScoredBox> select(const std::vector<ScoredBox> &boxes, const CascadeConfig &cfg,
                              bool suppress) {
  const double thr = suppress ? cfg.nms_threshold : std::numeric_limits<double>::infinity();
  std::vector<ScoredBox> kept;
  for (std::size_t idx : geometry::nms(boxes, thr, cfg.top_n))
    kept.push_back(boxes[idx]);
  return kept;
}

} // namespace

std::vector<ScoredBox> run_stage(std::span<const BoundingBox> inputs,
                                 const ProposalStage &stage, const CascadeConfig &cfg) {
  check_config(cfg);
  return select(score_and_regress(inputs, stage, cfg), cfg, true);
}

std::vector<ScoredBox> cascade_refine(std::span<const BoundingBox> anchors,
                                      const ProposalStage &stage_a,
                                      const ProposalStage &stage_b, const CascadeConfig &cfg) {
  check_config(cfg);
  if (anchors.empty())
    return {};
  const auto first =
      select(score_and_regress(anchors, stage_a, cfg), cfg, cfg.nms_between_stages);

  std::vector<BoundingBox> second_anchors;
  second_anchors.reserve(first.size());
  for (const auto &p : first)
    second_anchors.push_back(p.box);

  auto out = score_and_regress(second_anchors, stage_b, cfg);
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredBox &a, const ScoredBox &b) { return a.score > b.score; });
  return out;
}

ProposalStage error_halving_stage(std::vector<BoundingBox> ground_truths) {
  auto gts = std::make_shared<const std::vector<BoundingBox>>(std::move(ground_truths));
  auto best_match = [gts](const BoundingBox &box) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts->size(); ++g) {
      const double v = iou(box, (*gts)[g]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    return std::pair{best, best_iou};
  };
  ProposalStage stage;
  stage.scorer = [best_match](const BoundingBox &box) { return best_match(box).second; };
  stage.regressor = [gts, best_match](const BoundingBox &box) {
    const auto [g, v] = best_match(box);
    if (g < 0 || !box.has_positive_area())
      return BoxDelta{};
    const BoxDelta full = encode_delta(box, (*gts)[static_cast<std::size_t>(g)]);
    return BoxDelta{0.5 * full.tx, 0.5 * full.ty, 0.5 * full.tw, 0.5 * full.th};
  };
  return stage;
}

std::size_t SampleAssignment::count(SampleLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

SampleAssignment assign_samples(std::span<const BoundingBox> candidates,
                                std::span<const BoundingBox> ground_truths,
                                double pos_threshold, double neg_threshold) {
  if (!(0.0 <= neg_threshold && neg_threshold < pos_threshold && pos_threshold <= 1.0))
    throw std::invalid_argument("assign_samples: need 0 <= neg < pos <= 1");

  SampleAssignment out;
  out.labels.assign(candidates.size(), SampleLabel::kNegative);
  out.matched_gt.assign(candidates.size(), -1);
  if (ground_truths.empty())
    return out;

  // overlaps[c * G + g]
  const std::size_t G = ground_truths.size();
  std::vector<double> overlaps(candidates.size() * G);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (std::size_t g = 0; g < G; ++g)
      overlaps[c * G + g] = iou(candidates[c], ground_truths[g]);

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto row = overlaps.begin() + static_cast<std::ptrdiff_t>(c * G);
    const auto best = std::max_element(row, row + static_cast<std::ptrdiff_t>(G));
    const double v = *best;
    if (v > pos_threshold) {
      out.labels[c] = SampleLabel::kPositive;
      out.matched_gt[c] = static_cast<int>(best - row);
    } else if (v < neg_threshold) {
      out.labels[c] = SampleLabel::kNegative;
    } else {
      out.labels[c] = SampleLabel::kIgnored;
    }
  }

  // Best-candidate override: no ground truth goes without a positive.
  for (std::size_t g = 0; g < G; ++g) {
    std::ptrdiff_t best = -1;
    double best_iou = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (overlaps[c * G + g] > best_iou) {
        best_iou = overlaps[c * G + g];
        best = static_cast<std::ptrdiff_t>(c);
      }
    }
    if (best >= 0) {
      out.labels[best] = SampleLabel::kPositive;
      out.matched_gt[best] = static_cast<int>(g);
    }
  }
  return out;
}

Minibatch sample_minibatch(const SampleAssignment &assignment, const MinibatchConfig &cfg,
                           std::uint64_t seed) {
  if (cfg.max_size == 0)
    throw std::invalid_argument("sample_minibatch: max_size must be positive");
  if (!(cfg.ratio_min > 0.0 && cfg.ratio_min <= cfg.ratio_max))
    throw std::invalid_argument("sample_minibatch: invalid ratio range");

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    if (assignment.labels[i] == SampleLabel::kPositive)
      pos.push_back(i);
    else if (assignment.labels[i] == SampleLabel::kNegative)
      neg.push_back(i);
  }
  if (pos.empty() || neg.empty())
    return {};

  const double target = std::clamp(1.0, cfg.ratio_min, cfg.ratio_max);
  const std::size_t max_p = std::min(pos.size(), cfg.max_size - 1);
  std::size_t best_p = 0, best_n = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p <= max_p; ++p) {
    const std::size_t max_n = std::min(neg.size(), cfg.max_size - p);
    for (std::size_t n = 1; n <= max_n; ++n) {
      const double ratio = static_cast<double>(p) / static_cast<double>(n);
      if (ratio < cfg.ratio_min || ratio > cfg.ratio_max)
        continue;
      const double gap = std::abs(ratio - target);
      if (gap < best_gap || (gap == best_gap && p + n > best_p + best_n)) {
        best_gap = gap;
        best_p = p;
        best_n = n;
      }
    }
  }
  if (best_p == 0)
    return {};

  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  Minibatch batch;
  batch.positives.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(best_p));
  batch.negatives.assign(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(best_n));
  std::sort(batch.positives.begin(), batch.positives.end());
  std::sort(batch.negatives.begin(), batch.negatives.end());
  return batch;
}

std::vector<RecallPoint> recall_at_iou(std::span<const std::vector<BoundingBox>> proposals,
                                       std::span<const std::vector<BoundingBox>> ground_truths,
                                       std::span<const double> thresholds) {
  if (proposals.size() != ground_truths.size())
    throw std::invalid_argument("recall_at_iou: proposal and ground-truth image counts differ");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0))
      throw std::invalid_argument("recall_at_iou: thresholds must lie in [0,1]");
    if (i > 0 && thresholds[i] < thresholds[i - 1])
      throw std::invalid_argument("recall_at_iou: thresholds must be ascending");
  }

  // Best overlap per ground truth decides coverage at every threshold.
  std::vector<double> best_overlap;
  for (std::size_t img = 0; img < ground_truths.size(); ++img) {
    for (const auto &gt : ground_truths[img]) {
      double best = 0.0;
      for (const auto &p : proposals[img])
        best = std::max(best, iou(p, gt));
      best_overlap.push_back(best);
    }
  }
  if (best_overlap.empty())
    throw std::invalid_argument("recall_at_iou: no ground-truth boxes");

  std::vector<RecallPoint> curve;
  curve.reserve(thresholds.size());
  const auto total = static_cast<double>(best_overlap.size());
  for (double t : thresholds) {
    const auto covered = std::count_if(best_overlap.begin(), best_overlap.end(),
                                       [t](double v) { return v > 0.0 && v >= t; });
    curve.push_back({t, static_cast<double>(covered) / total});
  }
  return curve;
}

CascadeRecall oracle_cascade_recall(std::span<const std::vector<BoundingBox>> ground_truths,
                                    const AnchorConfig &anchor_cfg, const CascadeConfig &cfg,
                                    std::span<const double> thresholds) {
  const auto anchors = generate_anchors(anchor_cfg, cfg.image_width, cfg.image_height);
  std::vector<std::vector<BoundingBox>> one(ground_truths.size()), two(ground_truths.size());
  for (std::size_t i = 0; i < ground_truths.size(); ++i) {
    const auto stage = error_halving_stage(ground_truths[i]);
    for (const auto &p : run_stage(anchors, stage, cfg))
      one[i].push_back(p.box);
    for (const auto &p : cascade_refine(anchors, stage, stage, cfg))
      two[i].push_back(p.box);
  }
  return {recall_at_iou(one, ground_truths, thresholds),
          recall_at_iou(two, ground_truths, thresholds)};
}

} // namespace cpla::proposals
