// SPDX-License-Identifier: Apache-2.0
#include "cpla/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cpla::io {

using geometry::BoundingBox;

namespace {

/// A JSON node together with its path for error messages.
class Node {
public:
  Node(const json &value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string &path() const { return path_; }
  const json &value() const { return value_; }

  [[noreturn]] void fail(const std::string &what) const {
    throw FormatError(path_ + ": " + what);
  }

  bool has(const char *key) const { return value_.is_object() && value_.contains(key); }

  Node operator[](const char *key) const {
    if (!value_.is_object())
      fail("expected an object");
    if (!value_.contains(key))
      fail(std::string("missing field '") + key + "'");
    return {value_.at(key), path_ + "." + key};
  }

  Node item(std::size_t i) const { return {value_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  std::size_t array_size() const {
    if (!value_.is_array())
      fail("expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number())
      fail("expected a number");
    return value_.get<double>();
  }

  int integer() const {
    if (!value_.is_number_integer())
      fail("expected an integer");
    return value_.get<int>();
  }

  std::uint64_t unsigned_integer() const {
    if (!value_.is_number_unsigned() && !(value_.is_number_integer() && value_.get<long long>() >= 0))
      fail("expected a non-negative integer");
    return value_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!value_.is_string())
      fail("expected a string");
    return value_.get<std::string>();
  }

  double number_or(const char *key, double fallback) const {
    return has(key) ? (*this)[key].number() : fallback;
  }
  int integer_or(const char *key, int fallback) const {
    return has(key) ? (*this)[key].integer() : fallback;
  }

  BoundingBox box() const {
    if (array_size() != 4)
      fail("expected [x1, y1, x2, y2]");
    BoundingBox b{item(0).number(), item(1).number(), item(2).number(),
                  item(3).number()};
    if (!b.is_valid())
      fail("box must satisfy x1 <= x2 and y1 <= y2");
    return b;
  }

  std::pair<double, double> pair() const {
    if (array_size() != 2)
      fail("expected a two-element array");
    return {item(0).number(), item(1).number()};
  }

  void check_version() const {
    const int v = (*this)["format_version"].integer();
    if (v != kFormatVersion)
      (*this)["format_version"].fail("unsupported version " + std::to_string(v));
  }

private:
  const json &value_;
  std::string path_;
};

json box_json(const BoundingBox &b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

} // namespace

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

json parse_json(const std::string &text, const std::string &source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    // Translate the byte offset into a line/column pair.
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string reason = e.what();
    if (const auto pos = reason.find("syntax error"); pos != std::string::npos)
      reason = reason.substr(pos);
    throw FormatError(source_name + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": " + reason);
  }
}

json read_json_file(const std::filesystem::path &path) {
  return parse_json(read_text_file(path), path.string());
}

std::string dump(const json &doc) { return doc.dump(2) + "\n"; }

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void canonical_order(std::vector<linking::ActionTube> &tubes) {
  std::stable_sort(tubes.begin(), tubes.end(),
                   [](const linking::ActionTube &a, const linking::ActionTube &b) {
                     if (a.video_id != b.video_id)
                       return a.video_id < b.video_id;
                     if (a.class_id != b.class_id)
                       return a.class_id < b.class_id;
                     if (a.start_frame != b.start_frame)
                       return a.start_frame < b.start_frame;
                     if (a.end_frame != b.end_frame)
                       return a.end_frame < b.end_frame;
                     return a.tube_score > b.tube_score;
                   });
}

json to_json(const synth::SceneSpec &spec) {
  json actors = json::array();
  for (const auto &a : spec.actors) {
    actors.push_back({{"class_id", a.class_id},
                      {"entry_frame", a.entry_frame},
                      {"exit_frame", a.exit_frame},
                      {"box", box_json(a.box)},
                      {"velocity", json::array({a.velocity.dx, a.velocity.dy})},
                      {"velocity_noise", a.velocity_noise}});
  }
  const auto &d = spec.detector;
  const auto &p = spec.proposals;
  return {{"format_version", kFormatVersion},
          {"video_id", spec.video_id},
          {"width", spec.width},
          {"height", spec.height},
          {"num_frames", spec.num_frames},
          {"num_classes", spec.num_classes},
          {"seed", spec.seed},
          {"actors", actors},
          {"detector",
           {{"loc_sigma", d.loc_sigma},
            {"tp_score_mean", d.tp_score_mean},
            {"tp_score_sigma", d.tp_score_sigma},
            {"fp_score_mean", d.fp_score_mean},
            {"fp_score_sigma", d.fp_score_sigma},
            {"miss_rate", d.miss_rate},
            {"fp_rate", d.fp_rate},
            {"fp_min_size", d.fp_min_size},
            {"fp_max_size", d.fp_max_size}}},
          {"proposals",
           {{"miss_rate", p.miss_rate},
            {"jitter_sigma", p.jitter_sigma},
            {"background", p.background},
            {"cover_iou", p.cover_iou}}}};
}

synth::SceneSpec scene_spec_from_json(const json &doc) {
  const Node root(doc, "spec");
  root.check_version();
  synth::SceneSpec spec;
  spec.video_id = root["video_id"].string();
  spec.width = root["width"].number();
  spec.height = root["height"].number();
  spec.num_frames = root["num_frames"].integer();
  spec.num_classes = root["num_classes"].integer();
  spec.seed = root["seed"].unsigned_integer();

  const Node actors = root["actors"];
  for (std::size_t i = 0; i < actors.array_size(); ++i) {
    const Node a = actors.item(i);
    synth::ActorSpec actor;
    actor.class_id = a["class_id"].integer();
    actor.entry_frame = a["entry_frame"].integer();
    actor.exit_frame = a["exit_frame"].integer();
    actor.box = a["box"].box();
    const auto [vx, vy] = a["velocity"].pair();
    actor.velocity = {vx, vy};
    actor.velocity_noise = a.number_or("velocity_noise", 0.0);
    spec.actors.push_back(actor);
  }

  const Node d = root["detector"];
  spec.detector.loc_sigma = d["loc_sigma"].number();
  spec.detector.tp_score_mean = d["tp_score_mean"].number();
  spec.detector.tp_score_sigma = d["tp_score_sigma"].number();
  spec.detector.fp_score_mean = d["fp_score_mean"].number();
  spec.detector.fp_score_sigma = d["fp_score_sigma"].number();
  spec.detector.miss_rate = d["miss_rate"].number();
  spec.detector.fp_rate = d["fp_rate"].number();
  spec.detector.fp_min_size = d.number_or("fp_min_size", spec.detector.fp_min_size);
  spec.detector.fp_max_size = d.number_or("fp_max_size", spec.detector.fp_max_size);

  if (root.has("proposals")) {
    const Node p = root["proposals"];
    spec.proposals.miss_rate = p.number_or("miss_rate", spec.proposals.miss_rate);
    spec.proposals.jitter_sigma = p.number_or("jitter_sigma", spec.proposals.jitter_sigma);
    spec.proposals.background = p.integer_or("background", spec.proposals.background);
    spec.proposals.cover_iou = p.number_or("cover_iou", spec.proposals.cover_iou);
  }

  try {
    spec.validate();
  } catch (const std::invalid_argument &e) {
    throw FormatError(e.what());
  }
  return spec;
}

json to_json(const DetectionFile &file) {
  json frames = json::array();
  for (const auto &f : file.frames) {
    json dets = json::array();
    for (const auto &d : f.detections) {
      json det = {{"bbox", box_json(d.box)}, {"class_id", d.class_id}, {"score", d.score}};
      if (d.motion)
        det["motion"] = json::array({d.motion->dx, d.motion->dy});
      dets.push_back(std::move(det));
    }
    frames.push_back({{"frame_index", f.frame_index}, {"detections", std::move(dets)}});
  }
  return {{"format_version", kFormatVersion}, {"video_id", file.video_id}, {"frames", frames}};
}

DetectionFile detection_file_from_json(const json &doc) {
  const Node root(doc, "detections");
  root.check_version();
  DetectionFile file;
  file.video_id = root["video_id"].string();
  const Node frames = root["frames"];
  for (std::size_t i = 0; i < frames.array_size(); ++i) {
    const Node f = frames.item(i);
    linking::FrameDetections frame;
    frame.frame_index = f["frame_index"].integer();
    if (frame.frame_index < 0)
      f["frame_index"].fail("must be >= 0");
    if (!file.frames.empty() && frame.frame_index <= file.frames.back().frame_index)
      f["frame_index"].fail("frame indices must be strictly increasing");
    const Node dets = f["detections"];
    for (std::size_t k = 0; k < dets.array_size(); ++k) {
      const Node d = dets.item(k);
      linking::Detection det;
      det.box = d["bbox"].box();
      det.class_id = d["class_id"].integer();
      det.score = d["score"].number();
      if (!(det.score >= 0.0 && det.score <= 1.0))
        d["score"].fail("must lie in [0,1]");
      if (d.has("motion")) {
        const auto [dx, dy] = d["motion"].pair();
        det.motion = anticipation::Motion{dx, dy};
      }
      frame.detections.push_back(det);
    }
    file.frames.push_back(std::move(frame));
  }
  return file;
}

json to_json(const TubeFile &file) {
  json videos = json::array();
  for (const auto &v : file.videos) {
    videos.push_back({{"video_id", v.video_id},
                      {"width", v.width},
                      {"height", v.height},
                      {"num_frames", v.num_frames}});
  }
  json tubes = json::array();
  for (const auto &t : file.tubes) {
    json boxes = json::array();
    for (const auto &b : t.boxes)
      boxes.push_back(box_json(b));
    tubes.push_back({{"video_id", t.video_id},
                     {"class_id", t.class_id},
                     {"start", t.start_frame},
                     {"end", t.end_frame},
                     {"tube_score", t.tube_score},
                     {"boxes", std::move(boxes)},
                     {"scores", t.scores}});
  }
  json doc = {{"format_version", kFormatVersion}, {"tubes", std::move(tubes)}};
  if (!file.videos.empty())
    doc["videos"] = std::move(videos);
  return doc;
}

TubeFile tube_file_from_json(const json &doc) {
  const Node root(doc, "tubes");
  root.check_version();
  TubeFile file;
  if (root.has("videos")) {
    const Node videos = root["videos"];
    for (std::size_t i = 0; i < videos.array_size(); ++i) {
      const Node v = videos.item(i);
      file.videos.push_back({v["video_id"].string(), v["width"].number(), v["height"].number(),
                             v["num_frames"].integer()});
    }
  }
  const Node tubes = root["tubes"];
  for (std::size_t i = 0; i < tubes.array_size(); ++i) {
    const Node t = tubes.item(i);
    linking::ActionTube tube;
    tube.video_id = t["video_id"].string();
    tube.class_id = t["class_id"].integer();
    tube.start_frame = t["start"].integer();
    tube.end_frame = t["end"].integer();
    tube.tube_score = t["tube_score"].number();
    if (tube.end_frame < tube.start_frame)
      t["end"].fail("end precedes start");
    const Node boxes = t["boxes"];
    const auto expected = static_cast<std::size_t>(tube.end_frame - tube.start_frame + 1);
    if (boxes.array_size() != expected)
      boxes.fail("expected one box per frame in [start, end]");
    for (std::size_t k = 0; k < expected; ++k)
      tube.boxes.push_back(boxes.item(k).box());
    if (t.has("scores")) {
      const Node scores = t["scores"];
      if (scores.array_size() != expected)
        scores.fail("expected one score per frame in [start, end]");
      for (std::size_t k = 0; k < expected; ++k)
        tube.scores.push_back(scores.item(k).number());
    } else {
      tube.scores.assign(expected, tube.tube_score);
    }
    file.tubes.push_back(std::move(tube));
  }
  return file;
}

json to_json(const anticipation::LanModel &model) {
  json weights = json::array();
  for (const auto &row : model.weights)
    weights.push_back(row);
  return {{"format_version", kFormatVersion},
          {"gap", model.gap},
          {"weights", weights},
          {"bias", model.bias},
          {"feature_mean", model.feature_mean},
          {"feature_scale", model.feature_scale}};
}

anticipation::LanModel lan_model_from_json(const json &doc) {
  const Node root(doc, "model");
  root.check_version();
  anticipation::LanModel model;
  model.gap = root["gap"].integer();
  if (model.gap < 1)
    root["gap"].fail("must be >= 1");
  auto read_vector = [](const Node &node, std::size_t n, double *out) {
    if (node.array_size() != n)
      node.fail("expected " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < n; ++i)
      out[i] = node.item(i).number();
  };
  const Node weights = root["weights"];
  if (weights.array_size() != 4)
    weights.fail("expected 4 rows");
  for (std::size_t c = 0; c < 4; ++c)
    read_vector(weights.item(c), anticipation::kFeatureDim, model.weights[c].data());
  read_vector(root["bias"], 4, model.bias.data());
  read_vector(root["feature_mean"], anticipation::kFeatureDim, model.feature_mean.data());
  read_vector(root["feature_scale"], anticipation::kFeatureDim, model.feature_scale.data());
  if (!model.is_finite())
    root.fail("model parameters must be finite with positive feature scales");
  return model;
}

} // namespace cpla::io
