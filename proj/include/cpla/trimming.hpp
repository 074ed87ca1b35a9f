// SPDX-License-Identifier: Apache-2.0
/**
 * @file   trimming.hpp
 * @brief  Temporal trimming of linked tubes.
 *
 * For a tube with link scores S_0 .. S_{n-1} (S_t joins frames t and t+1)
 * the kept window [s, e] maximizes
 *
 *   (1 / (e - s)) * sum_{t=s}^{e-1} S_t - penalty(e - s, L)
 *
 * where L is the average class length in links. The penalty is
 * |(e - s) - L| / L in absolute mode and ((e - s) - L) / L in signed mode.
 */
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>

#include "cpla/linking.hpp"

namespace cpla::trimming {

enum class PenaltyMode : std::uint8_t { kAbsolute, kSigned };

std::string_view to_string(PenaltyMode mode);
PenaltyMode parse_penalty_mode(std::string_view name);

struct TrimmingParams {
  /// class id -> average tube length in links (end - start)
  std::map<int, double> avg_length;
  PenaltyMode mode = PenaltyMode::kAbsolute;

  /// Throws std::out_of_range naming the class when it has no entry.
  double length_for(int class_id) const;
};

/// Per-class mean of (end_frame - start_frame). Throws when a class mean is not positive.
TrimmingParams avg_class_length(std::span<const linking::ActionTube> training_tubes);

struct TrimResult {
  /// Link-index window: frames [start, end] of the tube are kept.
  std::size_t start = 0;
  std::size_t end = 0;
  double objective = 0.0;
};

double trimming_penalty(double links, double avg_length, PenaltyMode mode);

/**
 * Exhaustive O(n^2) search over all windows with prefix sums. Ties (within
 * 1e-12) keep the earliest start, then the earliest end. Throws
 * std::invalid_argument when there are no links or avg_length <= 0.
 */
TrimResult trim_links(std::span<const double> link_scores, double avg_length, PenaltyMode mode);

/// trim_links applied to the tube's own link scores; returns the trimmed tube.
linking::ActionTube trim_tube(const linking::ActionTube &tube, const linking::LinkingParams &linking,
                              const TrimmingParams &params, TrimResult *result = nullptr);

} // namespace cpla::trimming
