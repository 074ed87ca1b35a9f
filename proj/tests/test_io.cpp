// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "cpla/io.hpp"
#include "cpla/study.hpp"

using namespace cpla::io;
using cpla::linking::ActionTube;
using cpla::linking::Detection;
using cpla::linking::FrameDetections;

namespace {

std::string error_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const FormatError &e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST(ParseJson, ReportsLineAndColumn) {
  const std::string text = "{\n  \"a\": 1,\n  \"b\": ]\n}";
  const auto msg = error_of([&] { parse_json(text, "x.json"); });
  EXPECT_EQ(msg.rfind("x.json:3:", 0), 0u) << msg;
}

TEST(SceneSpec, RoundTripIsLossless) {
  const auto spec = cpla::evaluation::drifting_scene_fixture(1, 3).front();
  const auto back = scene_spec_from_json(parse_json(dump(to_json(spec)), "spec"));
  EXPECT_EQ(dump(to_json(back)), dump(to_json(spec)));
  ASSERT_EQ(back.actors.size(), spec.actors.size());
  EXPECT_EQ(back.actors[1].box, spec.actors[1].box);
  EXPECT_EQ(back.actors[1].velocity, spec.actors[1].velocity);
  EXPECT_EQ(back.detector.tp_score_sigma, spec.detector.tp_score_sigma);
  EXPECT_EQ(back.seed, spec.seed);
}

TEST(SceneSpec, MissingFieldIsNamed) {
  auto doc = to_json(cpla::evaluation::drifting_scene_fixture(1, 3).front());
  doc["detector"].erase("miss_rate");
  const auto msg = error_of([&] { scene_spec_from_json(doc); });
  EXPECT_NE(msg.find("miss_rate"), std::string::npos) << msg;
  EXPECT_NE(msg.find("spec.detector"), std::string::npos) << msg;
}

TEST(SceneSpec, WrongTypeAndVersionRejected) {
  auto doc = to_json(cpla::evaluation::drifting_scene_fixture(1, 3).front());
  doc["num_frames"] = "many";
  EXPECT_NE(error_of([&] { scene_spec_from_json(doc); }).find("num_frames"), std::string::npos);
  doc = to_json(cpla::evaluation::drifting_scene_fixture(1, 3).front());
  doc["format_version"] = 9;
  EXPECT_NE(error_of([&] { scene_spec_from_json(doc); }).find("format_version"), std::string::npos);
  doc = to_json(cpla::evaluation::drifting_scene_fixture(1, 3).front());
  doc["actors"][0]["class_id"] = 99;
  EXPECT_FALSE(error_of([&] { scene_spec_from_json(doc); }).empty());
}

TEST(DetectionFile, RoundTripIsLossless) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DetectionFile file{"vid", {}};
  for (int f = 0; f < 5; ++f) {
    FrameDetections frame{f * 2, {}};
    for (int k = 0; k < 3; ++k) {
      const double x = 100 * u(rng), y = 100 * u(rng);
      Detection d{{x, y, x + 1 + 50 * u(rng), y + 1 + 50 * u(rng)}, k, u(rng), std::nullopt};
      if (k == 1)
        d.motion = cpla::anticipation::Motion{u(rng), -u(rng)};
      frame.detections.push_back(d);
    }
    file.frames.push_back(frame);
  }
  const auto back = detection_file_from_json(parse_json(dump(to_json(file)), "dets"));
  ASSERT_EQ(back.frames.size(), file.frames.size());
  for (std::size_t f = 0; f < file.frames.size(); ++f) {
    EXPECT_EQ(back.frames[f].frame_index, file.frames[f].frame_index);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto &a = back.frames[f].detections[k];
      const auto &b = file.frames[f].detections[k];
      EXPECT_EQ(a.box, b.box);
      EXPECT_EQ(a.score, b.score);
      EXPECT_EQ(a.class_id, b.class_id);
      EXPECT_EQ(a.motion, b.motion);
    }
  }
}

TEST(DetectionFile, FrameIndicesMustIncrease) {
  DetectionFile file{"vid", {{3, {}}, {3, {}}}};
  const auto msg = error_of([&] { detection_file_from_json(to_json(file)); });
  EXPECT_NE(msg.find("frame_index"), std::string::npos) << msg;
}

TEST(DetectionFile, BadBoxAndScoreRejected) {
  auto doc = to_json(DetectionFile{"vid", {{0, {{{0, 0, 10, 10}, 0, 0.5, std::nullopt}}}}});
  auto bad = doc;
  bad["frames"][0]["detections"][0]["bbox"] = {5, 5, 1, 1};
  EXPECT_NE(error_of([&] { detection_file_from_json(bad); }).find("bbox"), std::string::npos);
  bad = doc;
  bad["frames"][0]["detections"][0]["score"] = 1.5;
  EXPECT_NE(error_of([&] { detection_file_from_json(bad); }).find("score"), std::string::npos);
}

TEST(TubeFile, RoundTripIsLossless) {
  ActionTube t;
  t.video_id = "v";
  t.class_id = 2;
  t.start_frame = 4;
  t.end_frame = 5;
  t.boxes = {{0.1, 0.2, 10.3, 10.4}, {1.0 / 3, 2.0 / 3, 11, 12}};
  t.scores = {0.7, 0.123456789012345};
  t.tube_score = 0.41;
  TubeFile file{{{"v", 320, 240, 10}}, {t}};
  const auto back = tube_file_from_json(parse_json(dump(to_json(file)), "tubes"));
  ASSERT_EQ(back.tubes.size(), 1u);
  EXPECT_EQ(back.tubes[0].boxes, t.boxes);
  EXPECT_EQ(back.tubes[0].scores, t.scores);
  EXPECT_EQ(back.tubes[0].tube_score, t.tube_score);
  ASSERT_EQ(back.videos.size(), 1u);
  EXPECT_EQ(back.videos[0].num_frames, 10);
}

TEST(TubeFile, ScoresDefaultToTubeScoreAndBoxCountChecked) {
  const auto doc = parse_json(R"({"format_version": 1, "tubes": [
    {"video_id": "v", "class_id": 0, "start": 2, "end": 3, "tube_score": 0.5,
     "boxes": [[0, 0, 1, 1], [0, 0, 2, 2]]}]})",
                              "t");
  const auto file = tube_file_from_json(doc);
  EXPECT_EQ(file.tubes[0].scores, (std::vector<double>{0.5, 0.5}));
  auto bad = doc;
  bad["tubes"][0]["end"] = 4;
  EXPECT_NE(error_of([&] { tube_file_from_json(bad); }).find("boxes"), std::string::npos);
}

TEST(LanModel, RoundTripIsLossless) {
  cpla::anticipation::LanModel m;
  m.gap = 8;
  m.weights[2][3] = -0.123456789;
  m.bias = {0.1, 0.2, 0.3, 0.4};
  m.feature_mean[5] = 1.0 / 7;
  m.feature_scale[0] = 2.5;
  const auto back = lan_model_from_json(parse_json(dump(to_json(m)), "model"));
  EXPECT_EQ(back.gap, 8);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.feature_mean, m.feature_mean);
  EXPECT_EQ(back.feature_scale, m.feature_scale);
}

TEST(CanonicalOrder, SortsByVideoClassAndStart) {
  auto make = [](std::string v, int c, int s) {
    ActionTube t;
    t.video_id = std::move(v);
    t.class_id = c;
    t.start_frame = s;
    t.end_frame = s;
    return t;
  };
  std::vector<ActionTube> tubes{make("b", 0, 0), make("a", 1, 0), make("a", 0, 5), make("a", 0, 2)};
  canonical_order(tubes);
  EXPECT_EQ(tubes[0].start_frame, 2);
  EXPECT_EQ(tubes[1].start_frame, 5);
  EXPECT_EQ(tubes[2].class_id, 1);
  EXPECT_EQ(tubes[3].video_id, "b");
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.2), "0.2");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3)), 1.0 / 3);
}
