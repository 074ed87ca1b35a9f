// SPDX-License-Identifier: Apache-2.0
/**
 * @file   io.hpp
 * @brief  JSON file formats: scene specs, detection files, tube files and
 *         anticipation models.
 *
 * Every document carries a `format_version` field. Readers reject
 * unknown versions and report the offending field path.
 */
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpla/anticipation.hpp"
#include "cpla/linking.hpp"
#include "cpla/synthdata.hpp"

namespace cpla::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Malformed or schema-violating input.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

/// Parse errors are reported as "<path>:<line>:<column>: <reason>".
json parse_json(const std::string &text, const std::string &source_name);
json read_json_file(const std::filesystem::path &path);
/// Two-space indented dump with a trailing newline.
std::string dump(const json &doc);
/// Shortest round-trip decimal form, used for every CSV number.
std::string format_number(double value);

struct DetectionFile {
  std::string video_id;
  std::vector<linking::FrameDetections> frames;
};

struct VideoInfo {
  std::string video_id;
  double width = 0.0;
  double height = 0.0;
  int num_frames = 0;
};

struct TubeFile {
  std::vector<VideoInfo> videos;
  std::vector<linking::ActionTube> tubes;
};

/// Sort by (video_id, class_id, start_frame, end_frame, -tube_score).
void canonical_order(std::vector<linking::ActionTube> &tubes);

json to_json(const synth::SceneSpec &spec);
synth::SceneSpec scene_spec_from_json(const json &doc);

json to_json(const DetectionFile &file);
DetectionFile detection_file_from_json(const json &doc);

/**
 * Tubes carry `boxes` and, optionally, per-frame `scores`; a tube without
 * per-frame scores reads back with tube_score on every frame.
 */
json to_json(const TubeFile &file);
TubeFile tube_file_from_json(const json &doc);

json to_json(const anticipation::LanModel &model);
anticipation::LanModel lan_model_from_json(const json &doc);

} // namespace cpla::io
