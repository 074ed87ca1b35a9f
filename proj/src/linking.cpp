// SPDX-License-Identifier: Apache-2.0
#include "cpla/linking.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cpla::linking {

using geometry::iou;

void LinkingParams::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("linking beta must lie in [0,1]");
}

void ActionTube::validate() const {
  if (end_frame < start_frame)
    throw std::invalid_argument("tube end frame precedes start frame");
  const auto expected = static_cast<std::size_t>(end_frame - start_frame + 1);
  if (boxes.size() != expected || scores.size() != expected)
    throw std::invalid_argument("tube box/score count does not match its frame range");
}

double mean_score(std::span<const double> scores) {
  if (scores.empty())
    return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

double linking_score(const Detection &current, const Detection &next, const LinkingParams &params) {
  if (current.class_id != next.class_id)
    throw std::invalid_argument("linking_score: detections belong to different classes");
  return (1.0 - params.beta) * (current.score + next.score) +
         params.beta * iou(current.box, next.box);
}

std::vector<double> tube_link_scores(const ActionTube &tube, const LinkingParams &params) {
  tube.validate();
  std::vector<double> links;
  for (std::size_t t = 0; t + 1 < tube.length(); ++t) {
    links.push_back((1.0 - params.beta) * (tube.scores[t] + tube.scores[t + 1]) +
                    params.beta * iou(tube.boxes[t], tube.boxes[t + 1]));
  }
  return links;
}

LinkedPath viterbi_link(std::span<const std::vector<Detection>> run, const LinkingParams &params) {
  if (run.empty())
    throw std::invalid_argument("viterbi_link: empty run");
  for (const auto &frame : run)
    if (frame.empty())
      throw std::invalid_argument("viterbi_link: frame without detections");

  LinkedPath path;
  path.indices.resize(run.size());
  if (run.size() == 1) {
    const auto &frame = run.front();
    std::size_t best = 0;
    for (std::size_t j = 1; j < frame.size(); ++j)
      if (frame[j].score > frame[best].score)
        best = j;
    path.indices[0] = best;
    path.score = frame[best].score;
    return path;
  }

  std::vector<double> acc(run.front().size(), 0.0);
  std::vector<std::vector<std::size_t>> back(run.size());
  for (std::size_t t = 1; t < run.size(); ++t) {
    const auto &prev = run[t - 1];
    const auto &cur = run[t];
    std::vector<double> next(cur.size());
    back[t].resize(cur.size());
    for (std::size_t j = 0; j < cur.size(); ++j) {
      std::size_t arg = 0;
      double best = acc[0] + linking_score(prev[0], cur[j], params);
      for (std::size_t i = 1; i < prev.size(); ++i) {
        const double v = acc[i] + linking_score(prev[i], cur[j], params);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      next[j] = best;
      back[t][j] = arg;
    }
    acc = std::move(next);
  }

  std::size_t last = 0;
  for (std::size_t j = 1; j < acc.size(); ++j)
    if (acc[j] > acc[last])
      last = j;
  path.score = acc[last];
  path.indices.back() = last;
  for (std::size_t t = run.size() - 1; t > 0; --t)
    path.indices[t - 1] = back[t][path.indices[t]];
  return path;
}

namespace {

struct Run {
  std::size_t begin = 0; // position in the video's frame list
  std::size_t end = 0;   // one past the last position
  LinkedPath path;
  double mean_link = 0.0;
};

double mean_link_score(const LinkedPath &path) {
  if (path.indices.size() < 2)
    return path.score;
  return path.score / static_cast<double>(path.indices.size() - 1);
}

class ClassLinker {
public:
  ClassLinker(std::span<const FrameDetections> video, int class_id, const ExtractionParams &params)
      : video_(video), class_id_(class_id), params_(params), remaining_(video.size()) {
    for (std::size_t p = 0; p < video.size(); ++p)
      for (const auto &d : video[p].detections)
        if (d.class_id == class_id)
          remaining_[p].push_back(d);
  }

  std::vector<ActionTube> extract(const std::string &video_id) {
    std::vector<Run> runs = split(0, video_.size());
    std::vector<ActionTube> tubes;
    while (tubes.size() < params_.max_tubes) {
      auto best = runs.end();
      for (auto it = runs.begin(); it != runs.end(); ++it) {
        if (it->mean_link < params_.min_path_score)
          continue;
        if (best == runs.end() || it->path.score > best->path.score)
          best = it;
      }
      if (best == runs.end())
        break;

      const Run run = *best;
      runs.erase(best);
      tubes.push_back(take(run, video_id));
      auto pieces = split(run.begin, run.end);
      runs.insert(runs.end(), pieces.begin(), pieces.end());
      std::sort(runs.begin(), runs.end(),
                [](const Run &a, const Run &b) { return a.begin < b.begin; });
    }
    return tubes;
  }

private:
  bool contiguous(std::size_t p) const {
    return video_[p].frame_index == video_[p - 1].frame_index + 1;
  }

  std::vector<Run> split(std::size_t begin, std::size_t end) const {
    std::vector<Run> runs;
    std::size_t p = begin;
    while (p < end) {
      if (remaining_[p].empty()) {
        ++p;
        continue;
      }
      Run run;
      run.begin = p++;
      while (p < end && !remaining_[p].empty() && contiguous(p))
        ++p;
      run.end = p;
      run.path = viterbi_link(std::span(remaining_).subspan(run.begin, run.end - run.begin),
                              params_.linking);
      run.mean_link = mean_link_score(run.path);
      runs.push_back(std::move(run));
    }
    return runs;
  }

  ActionTube take(const Run &run, const std::string &video_id) {
    ActionTube tube;
    tube.video_id = video_id;
    tube.class_id = class_id_;
    tube.start_frame = video_[run.begin].frame_index;
    tube.end_frame = video_[run.end - 1].frame_index;
    for (std::size_t p = run.begin; p < run.end; ++p) {
      auto &dets = remaining_[p];
      const std::size_t idx = run.path.indices[p - run.begin];
      tube.boxes.push_back(dets[idx].box);
      tube.scores.push_back(dets[idx].score);
      dets.erase(dets.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    tube.tube_score = mean_score(tube.scores);
    return tube;
  }

  std::span<const FrameDetections> video_;
  int class_id_;
  const ExtractionParams &params_;
  std::vector<std::vector<Detection>> remaining_;
};

} // namespace

std::vector<ActionTube> extract_tubes(std::span<const FrameDetections> video,
                                      const ExtractionParams &params,
                                      const std::string &video_id) {
  params.linking.validate();
  for (std::size_t p = 1; p < video.size(); ++p)
    if (video[p].frame_index <= video[p - 1].frame_index)
      throw std::invalid_argument("extract_tubes: frame indices must be strictly increasing");

  std::set<int> classes;
  for (const auto &frame : video)
    for (const auto &d : frame.detections)
      classes.insert(d.class_id);

  std::vector<ActionTube> tubes;
  for (int c : classes) {
    auto found = ClassLinker(video, c, params).extract(video_id);
    tubes.insert(tubes.end(), std::make_move_iterator(found.begin()),
                 std::make_move_iterator(found.end()));
  }
  std::stable_sort(tubes.begin(), tubes.end(), [](const ActionTube &a, const ActionTube &b) {
    if (a.class_id != b.class_id)
      return a.class_id < b.class_id;
    if (a.start_frame != b.start_frame)
      return a.start_frame < b.start_frame;
    return a.end_frame < b.end_frame;
  });
  return tubes;
}

} // namespace cpla::linking
