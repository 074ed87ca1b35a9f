// SPDX-License-Identifier: Apache-2.0
/**
 * @file   geometry.hpp
 * @brief  Axis-aligned box arithmetic shared by the whole pipeline.
 *
 * Coordinates are continuous pixels; a box spans [x1,x2]x[y1,y2] and its
 * area is (x2-x1)*(y2-y1) with no +1 correction.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cpla::geometry {

struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  /// Finite coordinates with x2 >= x1 and y2 >= y1.
  bool is_valid() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
           std::isfinite(y2) && x2 >= x1 && y2 >= y1;
  }
  bool has_positive_area() const { return x2 > x1 && y2 > y1; }

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  }

  friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

/// Regression offsets of a target box relative to a source box.
struct BoxDelta {
  double tx = 0.0;
  double ty = 0.0;
  double tw = 0.0;
  double th = 0.0;

  friend bool operator==(const BoxDelta &, const BoxDelta &) = default;
};

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;
};

/// Largest accepted |tw|, |th| in decode_delta: log(1000/16).
inline const double kDefaultMaxLogScale = std::log(1000.0 / 16.0);

double intersection_area(const BoundingBox &a, const BoundingBox &b);

/// Intersection over union; 0 when the union is empty.
double iou(const BoundingBox &a, const BoundingBox &b);

/**
 * R-CNN parameterization: tx = (tcx - scx) / sw, ty = (tcy - scy) / sh,
 * tw = log(tw / sw), th = log(th / sh).
 *
 * Throws std::invalid_argument when either box has zero width or height.
 */
BoxDelta encode_delta(const BoundingBox &source, const BoundingBox &target);

/**
 * Inverse of encode_delta. Throws std::invalid_argument for a degenerate
 * source and std::overflow_error when |tw| or |th| exceeds max_log_scale.
 */
BoundingBox decode_delta(const BoundingBox &source, const BoxDelta &delta,
                         double max_log_scale = kDefaultMaxLogScale);

/// Clamp all corners into [0,width]x[0,height].
BoundingBox clip(const BoundingBox &box, double width, double height);

/**
 * Greedy non-maximum suppression.
 *
 * Visits boxes by (score desc, index asc) and keeps a box unless its IoU
 * with an already kept box exceeds `threshold`. Returns kept indices in
 * visiting order. `max_keep` of 0 means unlimited.
 */
std::vector<std::size_t> nms(std::span<const ScoredBox> dets, double threshold,
                             std::size_t max_keep = 0);

} // namespace cpla::geometry
