// SPDX-License-Identifier: Apache-2.0
#include "cpla/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cpla::geometry {

double intersection_area(const BoundingBox &a, const BoundingBox &b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0)
    return 0.0;
  return w * h;
}

double iou(const BoundingBox &a, const BoundingBox &b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0)
    return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoxDelta encode_delta(const BoundingBox &source, const BoundingBox &target) {
  if (!source.has_positive_area())
    throw std::invalid_argument("encode_delta: source box has zero width or height");
  if (!target.has_positive_area())
    throw std::invalid_argument("encode_delta: target box has zero width or height");
  const double sw = source.width();
  const double sh = source.height();
  return {(target.center_x() - source.center_x()) / sw,
          (target.center_y() - source.center_y()) / sh,
          std::log(target.width() / sw), std::log(target.height() / sh)};
}

BoundingBox decode_delta(const BoundingBox &source, const BoxDelta &delta,
                         double max_log_scale) {
  if (!source.has_positive_area())
    throw std::invalid_argument("decode_delta: source box has zero width or height");
  if (!(std::abs(delta.tw) <= max_log_scale) || !(std::abs(delta.th) <= max_log_scale))
    throw std::overflow_error("decode_delta: log scale outside configured bound");
  const double sw = source.width();
  const double sh = source.height();
  const double cx = source.center_x() + delta.tx * sw;
  const double cy = source.center_y() + delta.ty * sh;
  return BoundingBox::from_center(cx, cy, sw * std::exp(delta.tw), sh * std::exp(delta.th));
}

BoundingBox clip(const BoundingBox &box, double width, double height) {
  return {std::clamp(box.x1, 0.0, width), std::clamp(box.y1, 0.0, height),
          std::clamp(box.x2, 0.0, width), std::clamp(box.y2, 0.0, height)};
}

std::vector<std::size_t> nms(std::span<const ScoredBox> dets, double threshold,
                             std::size_t max_keep) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    if (max_keep != 0 && kept.size() >= max_keep)
      break;
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(dets[idx].box, dets[k].box) > threshold;
    });
    if (!suppressed)
      kept.push_back(idx);
  }
  return kept;
}

} // namespace cpla::geometry
