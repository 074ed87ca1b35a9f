// SPDX-License-Identifier: Apache-2.0
#include "cpla/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cpla::evaluation {

double temporal_iou(const ActionTube &a, const ActionTube &b) {
  const int inter = std::min(a.end_frame, b.end_frame) - std::max(a.start_frame, b.start_frame) + 1;
  if (inter <= 0)
    return 0.0;
  const int uni = std::max(a.end_frame, b.end_frame) - std::min(a.start_frame, b.start_frame) + 1;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double tube_iou(const ActionTube &a, const ActionTube &b) {
  if (a.video_id != b.video_id)
    return 0.0;
  const double tiou = temporal_iou(a, b);
  if (tiou <= 0.0)
    return 0.0;
  const int first = std::max(a.start_frame, b.start_frame);
  const int last = std::min(a.end_frame, b.end_frame);
  double spatial = 0.0;
  for (int f = first; f <= last; ++f)
    spatial += geometry::iou(a.box_at(f), b.box_at(f));
  return tiou * spatial / static_cast<double>(last - first + 1);
}

MatchResult match_tubes(std::span<const ActionTube> predictions,
                        std::span<const ActionTube> ground_truths, double delta) {
  MatchResult result;
  result.order.resize(predictions.size());
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::stable_sort(result.order.begin(), result.order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].tube_score > predictions[b].tube_score;
  });
  result.gt_matched.assign(ground_truths.size(), false);
  result.matched_gt.assign(predictions.size(), -1);

  for (std::size_t rank = 0; rank < result.order.size(); ++rank) {
    const auto &pred = predictions[result.order[rank]];
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      if (result.gt_matched[g] || ground_truths[g].class_id != pred.class_id)
        continue;
      const double v = tube_iou(pred, ground_truths[g]);
      if (v >= delta && v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      result.gt_matched[static_cast<std::size_t>(best)] = true;
      result.matched_gt[rank] = best;
    }
  }
  return result;
}

double ap_from_ranked_hits(std::span<const std::uint8_t> hits, std::size_t num_ground_truths) {
  if (num_ground_truths == 0)
    throw std::invalid_argument("ap_from_ranked_hits: no ground truths");
  const std::size_t n = hits.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    tp += hits[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_ground_truths);
  }
  // Precision envelope, then area under the step curve.
  for (std::size_t k = n; k-- > 1;)
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

std::optional<double> average_precision(std::span<const ActionTube> predictions,
                                        std::span<const ActionTube> ground_truths, int class_id,
                                        double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("average_precision: delta must lie in (0,1]");
  std::vector<ActionTube> preds, gts;
  for (const auto &p : predictions)
    if (p.class_id == class_id)
      preds.push_back(p);
  for (const auto &g : ground_truths)
    if (g.class_id == class_id)
      gts.push_back(g);
  if (gts.empty())
    return std::nullopt;

  const auto match = match_tubes(preds, gts, delta);
  std::vector<std::uint8_t> hits(match.matched_gt.size());
  for (std::size_t k = 0; k < hits.size(); ++k)
    hits[k] = match.matched_gt[k] >= 0 ? 1 : 0;
  return ap_from_ranked_hits(hits, gts.size());
}

MapResult mean_ap(std::span<const ActionTube> predictions, std::span<const ActionTube> ground_truths,
                  std::span<const double> deltas) {
  std::set<int> classes;
  for (const auto &g : ground_truths)
    classes.insert(g.class_id);
  if (classes.empty())
    throw std::invalid_argument("mean_ap: no ground-truth tubes");

  MapResult result;
  for (double delta : deltas) {
    double sum = 0.0;
    auto &per_class = result.ap_by_class[delta];
    for (int c : classes) {
      const double ap = *average_precision(predictions, ground_truths, c, delta);
      per_class[c] = ap;
      sum += ap;
    }
    result.map_by_delta[delta] = sum / static_cast<double>(classes.size());
  }
  return result;
}

} // namespace cpla::evaluation
