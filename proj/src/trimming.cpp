// SPDX-License-Identifier: Apache-2.0
#include "cpla/trimming.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpla::trimming {

namespace {
constexpr double kTieTolerance = 1e-12;
}

std::string_view to_string(PenaltyMode mode) {
  return mode == PenaltyMode::kAbsolute ? "absolute" : "signed";
}

PenaltyMode parse_penalty_mode(std::string_view name) {
  if (name == "absolute")
    return PenaltyMode::kAbsolute;
  if (name == "signed")
    return PenaltyMode::kSigned;
  throw std::invalid_argument("unknown trimming mode '" + std::string(name) + "'");
}

double TrimmingParams::length_for(int class_id) const {
  const auto it = avg_length.find(class_id);
  if (it == avg_length.end())
    throw std::out_of_range("no average length for class " + std::to_string(class_id));
  return it->second;
}

TrimmingParams avg_class_length(std::span<const linking::ActionTube> training_tubes) {
  std::map<int, std::pair<double, std::size_t>> acc;
  for (const auto &tube : training_tubes) {
    auto &[sum, n] = acc[tube.class_id];
    sum += tube.end_frame - tube.start_frame;
    ++n;
  }
  TrimmingParams params;
  for (const auto &[cls, entry] : acc) {
    const double mean = entry.first / static_cast<double>(entry.second);
    if (!(mean > 0.0))
      throw std::invalid_argument("average length of class " + std::to_string(cls) +
                                  " is not positive");
    params.avg_length[cls] = mean;
  }
  return params;
}

double trimming_penalty(double links, double avg_length, PenaltyMode mode) {
  const double drift = (links - avg_length) / avg_length;
  return mode == PenaltyMode::kAbsolute ? std::abs(drift) : drift;
}

TrimResult trim_links(std::span<const double> link_scores, double avg_length, PenaltyMode mode) {
  if (link_scores.empty())
    throw std::invalid_argument("trim_links: tube has no links");
  if (!(avg_length > 0.0))
    throw std::invalid_argument("trim_links: average length must be positive");

  const std::size_t n = link_scores.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    prefix[t + 1] = prefix[t] + link_scores[t];

  TrimResult best;
  bool found = false;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t e = s + 1; e <= n; ++e) {
      const double links = static_cast<double>(e - s);
      const double value =
          (prefix[e] - prefix[s]) / links - trimming_penalty(links, avg_length, mode);
      if (!found || value > best.objective + kTieTolerance) {
        best = {s, e, value};
        found = true;
      }
    }
  }
  return best;
}

linking::ActionTube trim_tube(const linking::ActionTube &tube, const linking::LinkingParams &linking,
                              const TrimmingParams &params, TrimResult *result) {
  const auto links = linking::tube_link_scores(tube, linking);
  const TrimResult r = trim_links(links, params.length_for(tube.class_id), params.mode);
  if (result)
    *result = r;

  linking::ActionTube out;
  out.video_id = tube.video_id;
  out.class_id = tube.class_id;
  out.start_frame = tube.start_frame + static_cast<int>(r.start);
  out.end_frame = tube.start_frame + static_cast<int>(r.end);
  const auto first = static_cast<std::ptrdiff_t>(r.start);
  const auto last = static_cast<std::ptrdiff_t>(r.end) + 1;
  out.boxes.assign(tube.boxes.begin() + first, tube.boxes.begin() + last);
  out.scores.assign(tube.scores.begin() + first, tube.scores.begin() + last);
  out.tube_score = linking::mean_score(out.scores);
  return out;
}

} // namespace cpla::trimming
