// SPDX-License-Identifier: Apache-2.0
#include "cpla/synthdata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace cpla::synth {

namespace {

enum class Stream : std::uint32_t { kKinematics = 1, kProposals = 3, kDetections = 4 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(key),
                    static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

void require(bool ok, const std::string &what) {
  if (!ok)
    throw std::invalid_argument("scene spec: " + what);
}

bool is_rate(double v) { return v >= 0.0 && v <= 1.0; }

/// Gaussian corner jitter; keeps at least one pixel of extent before clipping.
BoundingBox jitter_box(const BoundingBox &box, const std::array<double, 4> &noise, double sigma,
                       double width, double height) {
  BoundingBox out{box.x1 + sigma * noise[0], box.y1 + sigma * noise[1], box.x2 + sigma * noise[2],
                  box.y2 + sigma * noise[3]};
  if (out.x2 < out.x1 + 1.0)
    out.x2 = out.x1 + 1.0;
  if (out.y2 < out.y1 + 1.0)
    out.y2 = out.y1 + 1.0;
  return geometry::clip(out, width, height);
}

std::array<double, 4> draw_normals(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng), n(rng), n(rng)};
}

BoundingBox random_box(std::mt19937_64 &rng, const SceneSpec &spec) {
  const auto &d = spec.detector;
  std::uniform_real_distribution<double> ux(0.0, spec.width);
  std::uniform_real_distribution<double> uy(0.0, spec.height);
  std::uniform_real_distribution<double> us(std::log(d.fp_min_size), std::log(d.fp_max_size));
  const double cx = ux(rng);
  const double cy = uy(rng);
  const double w = std::exp(us(rng));
  const double h = std::exp(us(rng));
  return geometry::clip(BoundingBox::from_center(cx, cy, w, h), spec.width, spec.height);
}

double draw_score(std::mt19937_64 &rng, double mean, double sigma) {
  std::normal_distribution<double> n(0.0, 1.0);
  return std::clamp(mean + sigma * n(rng), 0.0, 1.0);
}

} // namespace

void SceneSpec::validate() const {
  require(!video_id.empty(), "video_id must be non-empty");
  require(width > 0.0 && height > 0.0, "image width and height must be positive");
  require(num_frames >= 1, "num_frames must be >= 1");
  require(num_classes >= 1, "num_classes must be >= 1");
  const auto &d = detector;
  require(d.loc_sigma >= 0.0 && d.tp_score_sigma >= 0.0 && d.fp_score_sigma >= 0.0,
          "detector sigmas must be >= 0");
  require(is_rate(d.tp_score_mean) && is_rate(d.fp_score_mean),
          "detector score means must lie in [0,1]");
  require(is_rate(d.miss_rate), "detector miss_rate must lie in [0,1]");
  require(is_rate(d.fp_rate), "detector fp_rate must lie in [0,1]");
  require(d.fp_min_size > 0.0 && d.fp_min_size <= d.fp_max_size,
          "false-positive size range must satisfy 0 < min <= max");
  require(is_rate(proposals.miss_rate), "proposal miss_rate must lie in [0,1]");
  require(proposals.jitter_sigma >= 0.0, "proposal jitter_sigma must be >= 0");
  require(proposals.background >= 0, "proposal background count must be >= 0");
  require(is_rate(proposals.cover_iou), "proposal cover_iou must lie in [0,1]");
  for (std::size_t i = 0; i < actors.size(); ++i) {
    const auto &a = actors[i];
    const std::string who = "actor " + std::to_string(i) + ": ";
    require(a.class_id >= 0 && a.class_id < num_classes, who + "class_id out of range");
    require(a.entry_frame >= 0 && a.entry_frame < num_frames, who + "entry_frame out of range");
    require(a.exit_frame >= a.entry_frame, who + "exit_frame precedes entry_frame");
    require(a.box.is_valid() && a.box.has_positive_area(), who + "box must have positive area");
    require(std::isfinite(a.velocity.dx) && std::isfinite(a.velocity.dy),
            who + "velocity must be finite");
    require(a.velocity_noise >= 0.0, who + "velocity_noise must be >= 0");
  }
}

std::vector<ActionTube> Scene::ground_truth() const {
  std::vector<ActionTube> out;
  out.reserve(actors.size());
  for (const auto &a : actors)
    out.push_back(a.tube);
  return out;
}

std::vector<BoundingBox> Scene::boxes_at(int frame) const {
  std::vector<BoundingBox> out;
  for (const auto &a : actors)
    if (frame >= a.tube.start_frame && frame <= a.tube.end_frame)
      out.push_back(a.tube.box_at(frame));
  return out;
}

Motion Scene::motion_at(int frame, const BoundingBox &box) const {
  double wsum = 0.0, dx = 0.0, dy = 0.0;
  for (const auto &a : actors) {
    if (frame < a.tube.start_frame || frame > a.tube.end_frame)
      continue;
    const double w = geometry::intersection_area(box, a.tube.box_at(frame));
    if (w <= 0.0)
      continue;
    const auto &m = a.motion[static_cast<std::size_t>(frame - a.tube.start_frame)];
    wsum += w;
    dx += w * m.dx;
    dy += w * m.dy;
  }
  if (wsum <= 0.0)
    return {};
  return {dx / wsum, dy / wsum};
}

Scene generate_scene(const SceneSpec &spec) {
  spec.validate();
  Scene scene;
  scene.spec = spec;
  for (std::size_t i = 0; i < spec.actors.size(); ++i) {
    const auto &actor = spec.actors[i];
    const int first = actor.entry_frame;
    const int last = std::min(actor.exit_frame, spec.num_frames - 1);
    const auto frames = static_cast<std::size_t>(last - first + 1);

    auto rng = make_rng(spec.seed, Stream::kKinematics, i);
    std::normal_distribution<double> noise(0.0, 1.0);
    // disp[f] moves the actor from lifetime frame f to f + 1.
    std::vector<Motion> disp(frames);
    for (auto &d : disp) {
      const double ex = noise(rng), ey = noise(rng);
      d = {actor.velocity.dx + actor.velocity_noise * ex,
           actor.velocity.dy + actor.velocity_noise * ey};
    }

    std::vector<BoundingBox> raw(frames);
    raw[0] = actor.box;
    for (std::size_t f = 1; f < frames; ++f) {
      const auto &p = raw[f - 1];
      const auto &d = disp[f - 1];
      raw[f] = {p.x1 + d.dx, p.y1 + d.dy, p.x2 + d.dx, p.y2 + d.dy};
    }

    // First contiguous span with at least a pixel visible on each axis.
    auto visible = [&](std::size_t f) {
      const auto b = geometry::clip(raw[f], spec.width, spec.height);
      return b.width() >= 1.0 && b.height() >= 1.0;
    };
    std::size_t begin = 0;
    while (begin < frames && !visible(begin))
      ++begin;
    if (begin == frames)
      throw std::invalid_argument("scene spec: actor " + std::to_string(i) +
                                  " is never inside the image");
    std::size_t end = begin;
    while (end < frames && visible(end))
      ++end;

    ActorTrack track;
    track.actor_index = i;
    track.tube.video_id = spec.video_id;
    track.tube.class_id = actor.class_id;
    track.tube.start_frame = first + static_cast<int>(begin);
    track.tube.end_frame = first + static_cast<int>(end) - 1;
    for (std::size_t f = begin; f < end; ++f) {
      track.tube.boxes.push_back(geometry::clip(raw[f], spec.width, spec.height));
      track.tube.scores.push_back(1.0);
      track.motion.push_back(disp[f]);
    }
    track.tube.tube_score = 1.0;
    scene.actors.push_back(std::move(track));
  }
  return scene;
}

DetectionOracle::DetectionOracle(const Scene &scene) : scene_(scene) {}

std::vector<BoundingBox> DetectionOracle::proposals(int frame) const {
  const auto &spec = scene_.spec;
  auto rng = make_rng(spec.seed, Stream::kProposals, static_cast<std::uint64_t>(frame));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<BoundingBox> out;
  for (const auto &gt : scene_.boxes_at(frame)) {
    const double u = uniform(rng);
    const auto noise = draw_normals(rng);
    if (u < spec.proposals.miss_rate)
      continue;
    const auto box = jitter_box(gt, noise, spec.proposals.jitter_sigma, spec.width, spec.height);
    if (box.has_positive_area())
      out.push_back(box);
  }
  for (int k = 0; k < spec.proposals.background; ++k) {
    const auto box = random_box(rng, spec);
    if (box.has_positive_area())
      out.push_back(box);
  }
  return out;
}

FrameDetections DetectionOracle::detect(int frame, std::span<const BoundingBox> proposals) const {
  const auto &spec = scene_.spec;
  const auto &noise_cfg = spec.detector;
  auto rng = make_rng(spec.seed, Stream::kDetections, static_cast<std::uint64_t>(frame));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  FrameDetections out;
  out.frame_index = frame;
  for (const auto &actor : scene_.actors) {
    const auto &tube = actor.tube;
    if (frame < tube.start_frame || frame > tube.end_frame)
      continue;
    // Draw everything up front so coverage does not shift later draws.
    const double u = uniform(rng);
    const auto noise = draw_normals(rng);
    const double score = draw_score(rng, noise_cfg.tp_score_mean, noise_cfg.tp_score_sigma);

    const auto &gt = tube.box_at(frame);
    double cover = 0.0;
    for (const auto &p : proposals)
      cover = std::max(cover, geometry::iou(p, gt));
    if (cover < spec.proposals.cover_iou || cover <= 0.0 || u < noise_cfg.miss_rate)
      continue;
    const auto box = jitter_box(gt, noise, noise_cfg.loc_sigma, spec.width, spec.height);
    if (!box.has_positive_area())
      continue;
    out.detections.push_back({box, tube.class_id, score, scene_.motion_at(frame, box)});
  }

  std::poisson_distribution<int> fp_count(noise_cfg.fp_rate);
  const int n_fp = noise_cfg.fp_rate > 0.0 ? fp_count(rng) : 0;
  std::uniform_int_distribution<int> cls(0, spec.num_classes - 1);
  for (int k = 0; k < n_fp; ++k) {
    const auto box = random_box(rng, spec);
    const int c = cls(rng);
    const double score = draw_score(rng, noise_cfg.fp_score_mean, noise_cfg.fp_score_sigma);
    if (box.has_positive_area())
      out.detections.push_back({box, c, score, scene_.motion_at(frame, box)});
  }
  return out;
}

std::vector<FrameDetections> render_detections(const Scene &scene) {
  const DetectionOracle oracle(scene);
  std::vector<FrameDetections> video;
  video.reserve(static_cast<std::size_t>(scene.spec.num_frames));
  for (int f = 0; f < scene.spec.num_frames; ++f) {
    const auto truth = scene.boxes_at(f);
    video.push_back(oracle.detect(f, truth));
  }
  return video;
}

} // namespace cpla::synth
