// SPDX-License-Identifier: Apache-2.0
#include "cpla/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "cpla/evaluation.hpp"
#include "cpla/io.hpp"
#include "cpla/proposals.hpp"
#include "cpla/study.hpp"
#include "cpla/synthdata.hpp"
#include "cpla/trimming.hpp"

namespace cpla::cli {

namespace fs = std::filesystem;
using geometry::BoundingBox;
using io::format_number;
using linking::ActionTube;

namespace {

/// Bad arguments detected after parsing.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class LogLevel { kQuiet, kError, kWarn, kInfo, kDebug };

LogLevel log_level_from_env() {
  const char *env = std::getenv("CPLA_LOG_LEVEL");
  if (env == nullptr)
    return LogLevel::kWarn;
  const std::string v(env);
  if (v == "quiet")
    return LogLevel::kQuiet;
  if (v == "error")
    return LogLevel::kError;
  if (v == "info")
    return LogLevel::kInfo;
  if (v == "debug")
    return LogLevel::kDebug;
  return LogLevel::kWarn;
}

class Log {
public:
  explicit Log(std::ostream &err) : err_(err), level_(log_level_from_env()) {}

  void error(const std::string &msg) const { write(LogLevel::kError, "error", msg); }
  void warn(const std::string &msg) const { write(LogLevel::kWarn, "warning", msg); }
  void info(const std::string &msg) const { write(LogLevel::kInfo, "info", msg); }

private:
  void write(LogLevel level, const char *tag, const std::string &msg) const {
    if (level <= level_)
      err_ << "cpla: " << tag << ": " << msg << '\n';
  }

  std::ostream &err_;
  LogLevel level_;
};

/// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string &path, const std::string &text, std::ostream &out) {
  if (path.empty())
    out << text;
  else
    io::write_text_file(path, text);
}

std::vector<anticipation::Strategy> parse_strategies(const std::vector<std::string> &names) {
  std::vector<anticipation::Strategy> out;
  for (const auto &n : names) {
    try {
      out.push_back(anticipation::parse_strategy(n));
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

/// "0:30,1:42.5" -> {0: 30, 1: 42.5}.
trimming::TrimmingParams parse_length_table(const std::string &text) {
  trimming::TrimmingParams params;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw UsageError("--avg-len entry '" + item + "' is not CLASS:LENGTH");
    try {
      std::size_t used_c = 0, used_l = 0;
      const std::string cls = item.substr(0, colon), len = item.substr(colon + 1);
      const int c = std::stoi(cls, &used_c);
      const double l = std::stod(len, &used_l);
      if (used_c != cls.size() || used_l != len.size())
        throw std::invalid_argument("trailing characters");
      if (!(l > 0.0))
        throw UsageError("--avg-len for class " + std::to_string(c) + " must be positive");
      params.avg_length[c] = l;
    } catch (const UsageError &) {
      throw;
    } catch (const std::exception &) {
      throw UsageError("--avg-len entry '" + item + "' is not CLASS:LENGTH");
    }
  }
  if (params.avg_length.empty())
    throw UsageError("--avg-len table is empty");
  return params;
}

io::TubeFile read_tubes(const std::string &path) {
  return io::tube_file_from_json(io::read_json_file(path));
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string spec;
  std::string out_dir;
  std::string strategy = "none";
  int gap = 8;
  std::string model;
};

int cmd_simulate(const SimulateArgs &a, const Log &log) {
  const auto spec = io::scene_spec_from_json(io::read_json_file(a.spec));
  const auto strategy = parse_strategies({a.strategy}).front();
  std::optional<anticipation::LanModel> model;
  if (strategy == anticipation::Strategy::kTrainedLan) {
    if (a.model.empty())
      throw UsageError("--strategy lan requires --model");
    model = io::lan_model_from_json(io::read_json_file(a.model));
  }
  const int gap = model ? model->gap : a.gap;

  const auto scene = synth::generate_scene(spec);
  const auto video = evaluation::detect_video(scene, strategy, model ? &*model : nullptr, gap);

  io::TubeFile gt;
  gt.videos.push_back({spec.video_id, spec.width, spec.height, spec.num_frames});
  gt.tubes = scene.ground_truth();
  io::canonical_order(gt.tubes);

  fs::create_directories(a.out_dir);
  io::write_text_file(fs::path(a.out_dir) / "gt.json", io::dump(io::to_json(gt)));
  io::write_text_file(fs::path(a.out_dir) / "dets.json",
                      io::dump(io::to_json(io::DetectionFile{spec.video_id, video})));
  log.info("wrote " + std::to_string(gt.tubes.size()) + " ground-truth tubes and " +
           std::to_string(video.size()) + " detection frames to " + a.out_dir);
  return kExitOk;
}

// --------------------------------------------------------------- train-lan

struct TrainArgs {
  std::string spec;
  std::string out;
  int gap = 8;
  int epochs = 400;
  double learning_rate = 0.2;
  std::uint64_t seed = 0;
};

int cmd_train_lan(const TrainArgs &a, std::ostream &out, const Log &log) {
  const auto spec = io::scene_spec_from_json(io::read_json_file(a.spec));
  const auto scene = synth::generate_scene(spec);
  const auto video = evaluation::detect_video(scene, anticipation::Strategy::kNone, nullptr, a.gap);
  const auto frames = evaluation::lan_training_frames(scene, video, a.gap);
  anticipation::LanTrainingConfig cfg;
  cfg.gap = a.gap;
  cfg.epochs = a.epochs;
  cfg.learning_rate = a.learning_rate;
  cfg.seed = a.seed;
  const auto result = anticipation::train_lan(frames, cfg);
  emit(a.out, io::dump(io::to_json(result.model)), out);
  if (!result.loss_history.empty())
    log.info("final training loss " + format_number(result.loss_history.back()));
  return kExitOk;
}

// -------------------------------------------------------------------- link

struct LinkArgs {
  std::string dets;
  std::string out;
  double beta = 0.7;
  std::size_t max_tubes = 10;
  double min_score = 0.1;
};

int cmd_link(const LinkArgs &a, std::ostream &out, const Log &log) {
  const auto dets = io::detection_file_from_json(io::read_json_file(a.dets));
  linking::ExtractionParams params;
  params.linking.beta = a.beta;
  params.max_tubes = a.max_tubes;
  params.min_path_score = a.min_score;

  io::TubeFile file;
  file.tubes = linking::extract_tubes(dets.frames, params, dets.video_id);
  io::canonical_order(file.tubes);
  emit(a.out, io::dump(io::to_json(file)), out);
  log.info("linked " + std::to_string(file.tubes.size()) + " tubes");
  return kExitOk;
}

// -------------------------------------------------------------------- trim

struct TrimArgs {
  std::string tubes;
  std::string out;
  std::string avg_len;
  std::string train_tubes;
  std::string mode = "absolute";
  double beta = 0.7;
};

int cmd_trim(const TrimArgs &a, std::ostream &out, const Log &log) {
  auto file = read_tubes(a.tubes);
  trimming::TrimmingParams params;
  if (!a.avg_len.empty()) {
    params = parse_length_table(a.avg_len);
  } else if (!a.train_tubes.empty()) {
    const auto training = read_tubes(a.train_tubes);
    params = trimming::avg_class_length(training.tubes);
  } else {
    throw UsageError("trim needs --avg-len or --train-tubes");
  }
  params.mode = trimming::parse_penalty_mode(a.mode);

  for (const auto &tube : file.tubes)
    params.length_for(tube.class_id);

  linking::LinkingParams linking;
  linking.beta = a.beta;
  for (std::size_t i = 0; i < file.tubes.size(); ++i) {
    auto &tube = file.tubes[i];
    if (tube.length() < 2) {
      log.warn("tube " + std::to_string(i) + " (" + tube.video_id + ", class " +
               std::to_string(tube.class_id) + ") has a single frame; passed through");
      continue;
    }
    tube = trimming::trim_tube(tube, linking, params);
  }
  io::canonical_order(file.tubes);
  emit(a.out, io::dump(io::to_json(file)), out);
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string gt;
  std::string tubes;
  std::vector<double> deltas = evaluation::kDefaultDeltas;
  bool per_class = false;
};

int cmd_eval(const EvalArgs &a, std::ostream &out) {
  const auto gt = read_tubes(a.gt);
  const auto pred = read_tubes(a.tubes);
  const auto result = evaluation::mean_ap(pred.tubes, gt.tubes, a.deltas);

  std::ostringstream csv;
  csv << "delta,mAP";
  const auto &first_classes = result.ap_by_class.begin()->second;
  if (a.per_class)
    for (const auto &[c, ap] : first_classes)
      csv << ",class_" << c;
  csv << '\n';
  for (double d : a.deltas) {
    csv << format_number(d) << ',' << format_number(result.map_by_delta.at(d));
    if (a.per_class)
      for (const auto &[c, ap] : result.ap_by_class.at(d))
        csv << ',' << format_number(ap);
    csv << '\n';
  }
  out << csv.str();
  return kExitOk;
}

// ------------------------------------------------------------------- study

struct StudyArgs {
  std::string spec_dir;
  std::string out;
  std::vector<std::string> strategies{"none", "non-motion", "lan"};
  std::vector<int> gaps{2, 8, 16};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<double> deltas{0.05, 0.1, 0.2, 0.3};
  int replicas = 2;
  int epochs = 400;
  std::string mode = "absolute";
};

std::vector<synth::SceneSpec> read_spec_dir(const std::string &dir) {
  if (!fs::is_directory(dir))
    throw UsageError("spec directory " + dir + " does not exist");
  std::vector<fs::path> paths;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw UsageError("no .json scene specs in " + dir);
  std::vector<synth::SceneSpec> specs;
  for (const auto &p : paths)
    specs.push_back(io::scene_spec_from_json(io::read_json_file(p)));
  return specs;
}

/// One-line check of trained LAN > non-motion > none at delta 0.2 and K = 8.
std::string ordering_summary(const evaluation::StudyReport &report) {
  using anticipation::Strategy;
  const auto lan = report.lookup(Strategy::kTrainedLan, 8, 0.2);
  const auto still = report.lookup(Strategy::kNonMotion, 8, 0.2);
  const auto none = report.lookup(Strategy::kNone, 0, 0.2);
  if (!lan || !still || !none)
    return "summary: ordering check skipped (needs none, non-motion and lan at K=8, delta=0.2)\n";
  const bool holds = *lan > *still && *still > *none;
  return "summary: delta=0.2 lan(K=8)=" + format_number(*lan) +
         " non-motion(K=8)=" + format_number(*still) + " none=" + format_number(*none) +
         " ordering=" + (holds ? "holds" : "violated") + "\n";
}

int cmd_study(const StudyArgs &a, std::ostream &out, const Log &log) {
  evaluation::StudyConfig cfg;
  cfg.scenes = read_spec_dir(a.spec_dir);
  cfg.strategies = parse_strategies(a.strategies);
  cfg.gaps = a.gaps;
  cfg.seeds = a.seeds;
  cfg.deltas = a.deltas;
  cfg.training_replicas = a.replicas;
  cfg.lan.epochs = a.epochs;
  cfg.pipeline.trim_mode = trimming::parse_penalty_mode(a.mode);
  log.info("running study on " + std::to_string(cfg.scenes.size()) + " scenes");
  const auto report = evaluation::run_strategy_study(cfg);
  io::write_text_file(a.out, report.to_csv());
  out << ordering_summary(report);
  return kExitOk;
}

// ----------------------------------------------------------------- fixture

struct FixtureArgs {
  std::string out_dir;
  std::size_t count = 8;
  std::uint64_t seed = 7;
  double motion_scale = 1.0;
};

int cmd_fixture(const FixtureArgs &a) {
  fs::create_directories(a.out_dir);
  const auto specs = evaluation::drifting_scene_fixture(a.count, a.seed, a.motion_scale);
  for (const auto &spec : specs)
    io::write_text_file(fs::path(a.out_dir) / (spec.video_id + ".json"),
                        io::dump(io::to_json(spec)));
  return kExitOk;
}

// ------------------------------------------------------------------ recall

struct RecallArgs {
  std::string gt;
  std::string proposals;
  bool oracle_cascade = false;
  std::vector<double> thresholds{0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
  std::vector<double> anchor_scales{32.0, 64.0, 128.0};
};

void require_non_increasing(const std::vector<proposals::RecallPoint> &curve,
                            const std::string &label) {
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].recall > curve[i - 1].recall)
      throw std::logic_error("recall curve " + label + " increases at threshold " +
                             format_number(curve[i].threshold));
}

/// Ground-truth boxes grouped by frame for one video.
std::vector<std::vector<BoundingBox>> gt_by_frame(const io::TubeFile &gt, const std::string &video,
                                                  std::vector<int> *frames) {
  std::map<int, std::vector<BoundingBox>> grouped;
  for (const auto &t : gt.tubes) {
    if (t.video_id != video)
      continue;
    for (int f = t.start_frame; f <= t.end_frame; ++f)
      grouped[f].push_back(t.box_at(f));
  }
  std::vector<std::vector<BoundingBox>> out;
  for (auto &[f, boxes] : grouped) {
    if (frames)
      frames->push_back(f);
    out.push_back(std::move(boxes));
  }
  return out;
}

int cmd_recall(const RecallArgs &a, std::ostream &out) {
  const auto gt = read_tubes(a.gt);
  if (!std::is_sorted(a.thresholds.begin(), a.thresholds.end()))
    throw UsageError("--thresholds must be ascending");
  std::ostringstream csv;

  if (a.oracle_cascade) {
    if (gt.videos.empty())
      throw UsageError("--oracle-cascade needs image sizes in the ground-truth 'videos' list");
    proposals::AnchorConfig anchors;
    anchors.scales = a.anchor_scales;
    anchors.validate();
    std::vector<proposals::RecallPoint> one, two;
    // Pool every video; recall is a ratio of covered to total boxes.
    std::size_t total = 0;
    std::vector<double> covered_one(a.thresholds.size(), 0.0), covered_two(a.thresholds.size(), 0.0);
    for (const auto &video : gt.videos) {
      const auto per_frame = gt_by_frame(gt, video.video_id, nullptr);
      if (per_frame.empty())
        continue;
      proposals::CascadeConfig cfg;
      cfg.image_width = video.width;
      cfg.image_height = video.height;
      const auto curves = proposals::oracle_cascade_recall(per_frame, anchors, cfg, a.thresholds);
      std::size_t n = 0;
      for (const auto &boxes : per_frame)
        n += boxes.size();
      for (std::size_t i = 0; i < a.thresholds.size(); ++i) {
        covered_one[i] += curves.one_stage[i].recall * static_cast<double>(n);
        covered_two[i] += curves.two_stage[i].recall * static_cast<double>(n);
      }
      total += n;
    }
    if (total == 0)
      throw UsageError("ground-truth file has no boxes");
    for (std::size_t i = 0; i < a.thresholds.size(); ++i) {
      one.push_back({a.thresholds[i], covered_one[i] / static_cast<double>(total)});
      two.push_back({a.thresholds[i], covered_two[i] / static_cast<double>(total)});
    }
    require_non_increasing(one, "one-stage");
    require_non_increasing(two, "two-stage");
    csv << "curve,delta,recall\n";
    for (const auto &p : one)
      csv << "one-stage," << format_number(p.threshold) << ',' << format_number(p.recall) << '\n';
    for (const auto &p : two)
      csv << "two-stage," << format_number(p.threshold) << ',' << format_number(p.recall) << '\n';
  } else {
    if (a.proposals.empty())
      throw UsageError("recall needs --proposals or --oracle-cascade");
    const auto props = io::detection_file_from_json(io::read_json_file(a.proposals));
    std::vector<int> frames;
    const auto per_frame = gt_by_frame(gt, props.video_id, &frames);
    if (per_frame.empty())
      throw UsageError("no ground truth for video '" + props.video_id + "'");
    std::map<int, std::vector<BoundingBox>> by_frame;
    for (const auto &f : props.frames)
      for (const auto &d : f.detections)
        by_frame[f.frame_index].push_back(d.box);
    std::vector<std::vector<BoundingBox>> boxes;
    for (int f : frames)
      boxes.push_back(by_frame.count(f) ? by_frame.at(f) : std::vector<BoundingBox>{});
    const auto curve = proposals::recall_at_iou(boxes, per_frame, a.thresholds);
    require_non_increasing(curve, "proposals");
    csv << "delta,recall\n";
    for (const auto &p : curve)
      csv << format_number(p.threshold) << ',' << format_number(p.recall) << '\n';
  }
  out << csv.str();
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  const Log log(err);
  CLI::App app{"Spatio-temporal action tube pipeline on synthetic scenes", "cpla"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto *simulate = app.add_subcommand("simulate", "Generate a scene and its detections");
  simulate->add_option("spec", sim.spec, "Scene spec JSON")->required();
  simulate->add_option("out_dir", sim.out_dir, "Output directory for gt.json and dets.json")
      ->required();
  simulate->add_option("--strategy", sim.strategy, "Anticipation strategy: none, non-motion, lan")
      ->capture_default_str();
  simulate->add_option("--gap", sim.gap, "Anticipation gap K")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--model", sim.model, "Trained anticipation model (strategy lan)");

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train-lan", "Train the anticipation model on one scene");
  train_cmd->add_option("spec", train.spec, "Scene spec JSON")->required();
  train_cmd->add_option("-o,--output", train.out, "Model JSON (stdout if omitted)");
  train_cmd->add_option("--gap", train.gap, "Anticipation gap K")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--lr", train.learning_rate)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();

  LinkArgs lnk;
  auto *link = app.add_subcommand("link", "Link per-frame detections into tubes");
  link->add_option("dets", lnk.dets, "Detection file")->required();
  link->add_option("-o,--output", lnk.out, "Tube file (stdout if omitted)");
  link->add_option("--beta", lnk.beta, "IoU weight of the linking score")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  link->add_option("--max-tubes", lnk.max_tubes, "Tubes per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  link->add_option("--min-score", lnk.min_score, "Minimum mean link score of a tube")
      ->capture_default_str();

  TrimArgs trm;
  auto *trim = app.add_subcommand("trim", "Temporally trim tubes");
  trim->add_option("tubes", trm.tubes, "Tube file")->required();
  trim->add_option("-o,--output", trm.out, "Tube file (stdout if omitted)");
  auto *avg = trim->add_option("--avg-len", trm.avg_len, "Per-class lengths, e.g. 0:30,1:42");
  auto *train_tubes =
      trim->add_option("--train-tubes", trm.train_tubes, "Tube file to average lengths from");
  avg->excludes(train_tubes);
  trim->add_option("--mode", trm.mode, "Length penalty: absolute or signed")
      ->check(CLI::IsMember({"absolute", "signed"}))
      ->capture_default_str();
  trim->add_option("--beta", trm.beta)->check(CLI::Range(0.0, 1.0))->capture_default_str();

  EvalArgs ev;
  auto *eval = app.add_subcommand("eval", "Tube mAP per ST-IoU threshold as CSV");
  eval->add_option("gt", ev.gt, "Ground-truth tube file")->required();
  eval->add_option("tubes", ev.tubes, "Predicted tube file")->required();
  eval->add_option("--deltas", ev.deltas)
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval->add_flag("--per-class", ev.per_class, "Add one AP column per class");

  StudyArgs st;
  auto *study = app.add_subcommand("study", "Anticipation strategy and gap study");
  study->add_option("spec_dir", st.spec_dir, "Directory of scene spec JSON files")->required();
  study->add_option("-o,--output", st.out, "CSV output")->required();
  study->add_option("--strategies", st.strategies)->delimiter(',')->capture_default_str();
  study->add_option("--gaps", st.gaps)->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  study->add_option("--seeds", st.seeds)->delimiter(',')->capture_default_str();
  study->add_option("--deltas", st.deltas)
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  study->add_option("--replicas", st.replicas, "Training scenes per spec")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  study->add_option("--epochs", st.epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
  study->add_option("--mode", st.mode)->check(CLI::IsMember({"absolute", "signed"}))->capture_default_str();

  FixtureArgs fx;
  auto *fixture = app.add_subcommand("fixture", "Write the drifting-scene fixture specs");
  fixture->add_option("out_dir", fx.out_dir)->required();
  fixture->add_option("--count", fx.count)->check(CLI::PositiveNumber)->capture_default_str();
  fixture->add_option("--seed", fx.seed)->capture_default_str();
  fixture->add_option("--motion-scale", fx.motion_scale)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  RecallArgs rc;
  auto *recall = app.add_subcommand("recall", "Proposal recall versus IoU threshold as CSV");
  recall->add_option("--gt", rc.gt, "Ground-truth tube file")->required();
  auto *props = recall->add_option("--proposals", rc.proposals, "Detection file of proposals");
  auto *oracle = recall->add_flag("--oracle-cascade", rc.oracle_cascade,
                                  "One- and two-stage error-halving cascade curves");
  props->excludes(oracle);
  recall->add_option("--thresholds", rc.thresholds)
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  recall->add_option("--anchor-scales", rc.anchor_scales)
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed())
      return cmd_simulate(sim, log);
    if (train_cmd->parsed())
      return cmd_train_lan(train, out, log);
    if (link->parsed())
      return cmd_link(lnk, out, log);
    if (trim->parsed())
      return cmd_trim(trm, out, log);
    if (eval->parsed())
      return cmd_eval(ev, out);
    if (study->parsed())
      return cmd_study(st, out, log);
    if (fixture->parsed())
      return cmd_fixture(fx);
    if (recall->parsed())
      return cmd_recall(rc, out);
  } catch (const io::FormatError &e) {
    log.error(e.what());
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    log.error(e.what());
    return kExitUsage;
  } catch (const std::out_of_range &e) {
    log.error(e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    log.error(e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace cpla::cli
