// SPDX-License-Identifier: Apache-2.0
#include "cpla/study.hpp"

#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cpla/evaluation.hpp"
#include "cpla/io.hpp"

namespace cpla::evaluation {

using anticipation::LanFrame;
using anticipation::LanInput;
using anticipation::LanModel;
using linking::ActionTube;
using linking::FrameDetections;

namespace {

std::vector<LanInput> lan_inputs(const FrameDetections &frame) {
  std::vector<LanInput> out;
  out.reserve(frame.detections.size());
  for (const auto &d : frame.detections)
    out.push_back({d.box, d.motion.value_or(anticipation::Motion{})});
  return out;
}

synth::SceneSpec instance(const synth::SceneSpec &tmpl, std::uint64_t seed, std::size_t index,
                          std::size_t replica) {
  synth::SceneSpec spec = tmpl;
  spec.seed = derive_seed(seed, index, replica);
  if (replica > 0)
    spec.video_id += "#train" + std::to_string(replica);
  return spec;
}

} // namespace

bool uses_gap(Strategy s) { return s != Strategy::kNone; }

std::uint64_t derive_seed(std::uint64_t seed, std::size_t scene, std::size_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(scene), static_cast<std::uint32_t>(replica)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<FrameDetections> detect_video(const synth::Scene &scene, Strategy strategy,
                                          const LanModel *model, int gap) {
  if (uses_gap(strategy) && gap < 1)
    throw std::invalid_argument("detect_video: anticipation gap must be >= 1");
  const synth::DetectionOracle oracle(scene);
  const auto &spec = scene.spec;
  std::vector<FrameDetections> video;
  video.reserve(static_cast<std::size_t>(spec.num_frames));
  for (int t = 0; t < spec.num_frames; ++t) {
    auto proposals = oracle.proposals(t);
    if (uses_gap(strategy) && t >= gap) {
      const auto inputs = lan_inputs(video[static_cast<std::size_t>(t - gap)]);
      const auto anticipated =
          anticipation::anticipate(strategy, model, inputs, spec.width, spec.height);
      proposals = anticipation::augment_proposals(proposals, anticipated);
    }
    video.push_back(oracle.detect(t, proposals));
  }
  return video;
}

std::vector<LanFrame> lan_training_frames(const synth::Scene &scene,
                                          std::span<const FrameDetections> video, int gap) {
  std::vector<LanFrame> frames;
  for (std::size_t t = static_cast<std::size_t>(gap); t < video.size(); ++t) {
    LanFrame frame;
    frame.image_width = scene.spec.width;
    frame.image_height = scene.spec.height;
    frame.detections = lan_inputs(video[t - static_cast<std::size_t>(gap)]);
    frame.ground_truths = scene.boxes_at(video[t].frame_index);
    if (!frame.detections.empty())
      frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<ActionTube> link_and_trim(std::span<const FrameDetections> video,
                                      const PipelineParams &params,
                                      const trimming::TrimmingParams &lengths,
                                      const std::string &video_id) {
  auto tubes = linking::extract_tubes(video, params.extraction, video_id);
  trimming::TrimmingParams trim = lengths;
  trim.mode = params.trim_mode;
  for (auto &tube : tubes) {
    if (tube.length() >= 2)
      tube = trimming::trim_tube(tube, params.extraction.linking, trim);
  }
  return tubes;
}

std::vector<double> run_study_cell(const StudyConfig &cfg, Strategy strategy, int gap,
                                   std::uint64_t seed) {
  // Training replicas supply the class lengths and, for the trained strategy, the model.
  std::vector<ActionTube> training_tubes;
  std::vector<LanFrame> lan_frames;
  for (std::size_t i = 0; i < cfg.scenes.size(); ++i) {
    for (int r = 1; r <= cfg.training_replicas; ++r) {
      const auto scene =
          synth::generate_scene(instance(cfg.scenes[i], seed, i, static_cast<std::size_t>(r)));
      const auto truth = scene.ground_truth();
      training_tubes.insert(training_tubes.end(), truth.begin(), truth.end());
      if (strategy == Strategy::kTrainedLan) {
        const auto video = detect_video(scene, Strategy::kNone, nullptr, gap);
        auto frames = lan_training_frames(scene, video, gap);
        lan_frames.insert(lan_frames.end(), std::make_move_iterator(frames.begin()),
                          std::make_move_iterator(frames.end()));
      }
    }
  }
  const auto lengths = trimming::avg_class_length(training_tubes);

  std::optional<LanModel> model;
  if (strategy == Strategy::kTrainedLan) {
    anticipation::LanTrainingConfig lan = cfg.lan;
    lan.gap = gap;
    lan.seed = seed;
    model = anticipation::train_lan(lan_frames, lan).model;
  }

  std::vector<ActionTube> predictions, truth;
  for (std::size_t i = 0; i < cfg.scenes.size(); ++i) {
    const auto scene = synth::generate_scene(instance(cfg.scenes[i], seed, i, 0));
    const auto video = detect_video(scene, strategy, model ? &*model : nullptr, gap);
    auto tubes = link_and_trim(video, cfg.pipeline, lengths, scene.spec.video_id);
    predictions.insert(predictions.end(), tubes.begin(), tubes.end());
    const auto gt = scene.ground_truth();
    truth.insert(truth.end(), gt.begin(), gt.end());
  }

  const auto result = mean_ap(predictions, truth, cfg.deltas);
  std::vector<double> out;
  for (double d : cfg.deltas)
    out.push_back(result.map_by_delta.at(d));
  return out;
}

StudyReport run_strategy_study(const StudyConfig &cfg) {
  if (cfg.scenes.empty())
    throw std::invalid_argument("strategy study: no scenes");
  if (cfg.seeds.empty())
    throw std::invalid_argument("strategy study: no seeds");

  struct Cell {
    Strategy strategy;
    int gap;
  };
  std::vector<Cell> cells;
  for (Strategy s : cfg.strategies) {
    if (uses_gap(s)) {
      for (int k : cfg.gaps)
        cells.push_back({s, k});
    } else {
      cells.push_back({s, 0});
    }
  }

  // Cells are independent; results are collected in a fixed order.
  std::vector<std::vector<std::future<std::vector<double>>>> jobs(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t seed : cfg.seeds)
      jobs[c].push_back(std::async(std::launch::async, run_study_cell, std::cref(cfg),
                                   cells[c].strategy, cells[c].gap, seed));

  StudyReport report;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> sum(cfg.deltas.size(), 0.0);
    for (auto &job : jobs[c]) {
      const auto maps = job.get();
      for (std::size_t d = 0; d < sum.size(); ++d)
        sum[d] += maps[d];
    }
    for (std::size_t d = 0; d < sum.size(); ++d)
      report.rows.push_back({cells[c].strategy, cells[c].gap, cfg.deltas[d],
                             sum[d] / static_cast<double>(cfg.seeds.size())});
  }
  return report;
}

std::optional<double> StudyReport::lookup(Strategy strategy, int gap, double delta) const {
  for (const auto &row : rows)
    if (row.strategy == strategy && (!uses_gap(strategy) || row.gap == gap) && row.delta == delta)
      return row.map;
  return std::nullopt;
}

std::string StudyReport::to_csv() const {
  std::ostringstream out;
  out << "strategy,K,delta,mAP\n";
  for (const auto &row : rows) {
    out << anticipation::to_string(row.strategy) << ','
        << (uses_gap(row.strategy) ? std::to_string(row.gap) : std::string("-")) << ','
        << io::format_number(row.delta) << ',' << io::format_number(row.map) << '\n';
  }
  return out.str();
}

std::vector<synth::SceneSpec> drifting_scene_fixture(std::size_t count, std::uint64_t seed,
                                                     double motion_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<synth::SceneSpec> scenes;
  for (std::size_t s = 0; s < count; ++s) {
    synth::SceneSpec spec;
    spec.video_id = "drift" + std::to_string(s);
    spec.width = 320;
    spec.height = 240;
    spec.num_frames = 64;
    spec.num_classes = 3;
    spec.detector.loc_sigma = 2.0;
    spec.detector.tp_score_mean = 0.7;
    spec.detector.tp_score_sigma = 0.15;
    spec.detector.fp_score_mean = 0.35;
    spec.detector.fp_score_sigma = 0.1;
    spec.detector.miss_rate = 0.0;
    spec.detector.fp_rate = 0.3;
    spec.detector.fp_min_size = 30;
    spec.detector.fp_max_size = 90;
    spec.proposals.miss_rate = 0.1;
    spec.proposals.jitter_sigma = 2.0;
    spec.proposals.background = 10;
    spec.proposals.cover_iou = 0.5;

    for (int a = 0; a < 3; ++a) {
      synth::ActorSpec actor;
      actor.class_id = a;
      actor.entry_frame = static_cast<int>(uniform(0, 16));
      actor.exit_frame = static_cast<int>(uniform(actor.entry_frame + 30, spec.num_frames));
      const double w = uniform(40, 70);
      const double h = uniform(50, 90);
      const double speed = uniform(1.0, 4.0) * motion_scale;
      const double angle = uniform(0.0, 2.0 * std::numbers::pi);
      actor.velocity = {speed * std::cos(angle), speed * std::sin(angle)};
      actor.velocity_noise = 0.2 * motion_scale;
      // Start so that the path is centered near the middle of the image.
      const double half = 0.5 * (actor.exit_frame - actor.entry_frame);
      const double cx = 0.5 * spec.width + uniform(-60, 60) - actor.velocity.dx * half;
      const double cy = 0.5 * spec.height + uniform(-40, 40) - actor.velocity.dy * half;
      actor.box = geometry::BoundingBox::from_center(cx, cy, w, h);
      spec.actors.push_back(actor);
    }
    scenes.push_back(std::move(spec));
  }
  return scenes;
}

} // namespace cpla::evaluation
