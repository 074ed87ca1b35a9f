// SPDX-License-Identifier: Apache-2.0
#include "cpla/anticipation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cpla/proposals.hpp"

namespace cpla::anticipation {

using geometry::clip;
using geometry::decode_delta;
using geometry::encode_delta;

std::string_view to_string(Strategy s) {
  switch (s) {
  case Strategy::kNone:
    return "none";
  case Strategy::kNonMotion:
    return "non-motion";
  case Strategy::kTrainedLan:
    return "lan";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "none")
    return Strategy::kNone;
  if (name == "non-motion")
    return Strategy::kNonMotion;
  if (name == "lan")
    return Strategy::kTrainedLan;
  throw std::invalid_argument("unknown anticipation strategy '" + std::string(name) + "'");
}

FeatureVector lan_feature(const LanInput &input, double image_width, double image_height) {
  const auto &b = input.box;
  if (!b.has_positive_area())
    throw std::invalid_argument("lan_feature: box has zero width or height");
  const double w = b.width();
  const double h = b.height();
  return {b.center_x() / image_width, b.center_y() / image_height, std::log(w), std::log(h),
          input.motion.dx / w, input.motion.dy / h};
}

BoxDelta LanModel::predict(const FeatureVector &raw_feature) const {
  std::array<double, 4> out = bias;
  for (std::size_t k = 0; k < kFeatureDim; ++k) {
    const double z = (raw_feature[k] - feature_mean[k]) / feature_scale[k];
    for (std::size_t c = 0; c < 4; ++c)
      out[c] += weights[c][k] * z;
  }
  return {out[0], out[1], out[2], out[3]};
}

bool LanModel::is_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (const auto &row : weights)
    if (!std::all_of(row.begin(), row.end(), finite))
      return false;
  return std::all_of(bias.begin(), bias.end(), finite) &&
         std::all_of(feature_mean.begin(), feature_mean.end(), finite) &&
         std::all_of(feature_scale.begin(), feature_scale.end(),
                     [](double v) { return std::isfinite(v) && v > 0.0; });
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_derivative(double x) {
  if (x <= -1.0)
    return -1.0;
  if (x >= 1.0)
    return 1.0;
  return x;
}

namespace {

std::array<double, 4> as_array(const BoxDelta &d) { return {d.tx, d.ty, d.tw, d.th}; }

void check_loss_args(std::span<const BoxDelta> predicted, std::span<const BoxDelta> target,
                     std::span<const std::uint8_t> labels) {
  if (predicted.empty())
    throw std::invalid_argument("lan_loss: no boxes");
  if (predicted.size() != target.size() || predicted.size() != labels.size())
    throw std::invalid_argument("lan_loss: length mismatch");
}

} // namespace

double lan_loss(std::span<const BoxDelta> predicted, std::span<const BoxDelta> target,
                std::span<const std::uint8_t> labels) {
  check_loss_args(predicted, target, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!labels[i])
      continue;
    const auto p = as_array(predicted[i]);
    const auto t = as_array(target[i]);
    for (std::size_t c = 0; c < 4; ++c)
      total += smooth_l1(p[c] - t[c]);
  }
  return total / static_cast<double>(predicted.size());
}

std::vector<BoxDelta> lan_loss_gradient(std::span<const BoxDelta> predicted,
                                        std::span<const BoxDelta> target,
                                        std::span<const std::uint8_t> labels) {
  check_loss_args(predicted, target, labels);
  const double inv_n = 1.0 / static_cast<double>(predicted.size());
  std::vector<BoxDelta> grad(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!labels[i])
      continue;
    const auto p = as_array(predicted[i]);
    const auto t = as_array(target[i]);
    grad[i] = {inv_n * smooth_l1_derivative(p[0] - t[0]),
               inv_n * smooth_l1_derivative(p[1] - t[1]),
               inv_n * smooth_l1_derivative(p[2] - t[2]),
               inv_n * smooth_l1_derivative(p[3] - t[3])};
  }
  return grad;
}

LanObjective::LanObjective(std::span<const LanFrame> frames, const LanTrainingConfig &cfg) {
  for (const auto &src : frames) {
    std::vector<BoundingBox> boxes;
    Frame frame;
    for (const auto &det : src.detections) {
      if (!det.box.has_positive_area())
        continue;
      boxes.push_back(det.box);
      frame.features.push_back(lan_feature(det, src.image_width, src.image_height));
    }
    if (boxes.empty())
      continue;
    const auto assignment = proposals::assign_samples(boxes, src.ground_truths,
                                                      cfg.pos_threshold, cfg.neg_threshold);
    frame.targets.resize(boxes.size());
    frame.labels.resize(boxes.size(), 0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (assignment.labels[i] != proposals::SampleLabel::kPositive)
        continue;
      const auto &gt = src.ground_truths[static_cast<std::size_t>(assignment.matched_gt[i])];
      if (!gt.has_positive_area())
        continue;
      frame.targets[i] = encode_delta(boxes[i], gt);
      frame.labels[i] = 1;
      ++positives_;
    }
    frames_.push_back(std::move(frame));
  }
}

void LanObjective::fit_normalization(LanModel &model) const {
  FeatureVector sum{}, sq{};
  std::size_t n = 0;
  for (const auto &f : frames_) {
    for (const auto &x : f.features) {
      for (std::size_t k = 0; k < kFeatureDim; ++k) {
        sum[k] += x[k];
        sq[k] += x[k] * x[k];
      }
      ++n;
    }
  }
  if (n == 0)
    return;
  for (std::size_t k = 0; k < kFeatureDim; ++k) {
    const double mean = sum[k] / static_cast<double>(n);
    const double var = std::max(0.0, sq[k] / static_cast<double>(n) - mean * mean);
    model.feature_mean[k] = mean;
    model.feature_scale[k] = std::sqrt(var) > 1e-9 ? std::sqrt(var) : 1.0;
  }
}

double LanObjective::loss(const LanModel &model) const {
  if (frames_.empty())
    return 0.0;
  double total = 0.0;
  for (const auto &f : frames_) {
    std::vector<BoxDelta> pred;
    pred.reserve(f.features.size());
    for (const auto &x : f.features)
      pred.push_back(model.predict(x));
    total += lan_loss(pred, f.targets, f.labels);
  }
  return total / static_cast<double>(frames_.size());
}

double LanObjective::loss_and_gradient(const LanModel &model, Gradient &grad) const {
  grad = {};
  if (frames_.empty())
    return 0.0;
  const double inv_frames = 1.0 / static_cast<double>(frames_.size());
  double total = 0.0;
  for (const auto &f : frames_) {
    std::vector<BoxDelta> pred;
    pred.reserve(f.features.size());
    for (const auto &x : f.features)
      pred.push_back(model.predict(x));
    total += lan_loss(pred, f.targets, f.labels);
    const auto dpred = lan_loss_gradient(pred, f.targets, f.labels);
    for (std::size_t i = 0; i < f.features.size(); ++i) {
      if (!f.labels[i])
        continue;
      const auto g = as_array(dpred[i]);
      for (std::size_t k = 0; k < kFeatureDim; ++k) {
        const double z = (f.features[i][k] - model.feature_mean[k]) / model.feature_scale[k];
        for (std::size_t c = 0; c < 4; ++c)
          grad.weights[c][k] += inv_frames * g[c] * z;
      }
      for (std::size_t c = 0; c < 4; ++c)
        grad.bias[c] += inv_frames * g[c];
    }
  }
  return total * inv_frames;
}

LanTrainingResult train_lan(std::span<const LanFrame> frames, const LanTrainingConfig &cfg) {
  if (cfg.gap < 1)
    throw std::invalid_argument("train_lan: anticipation gap must be >= 1");
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0.0))
    throw std::invalid_argument("train_lan: invalid optimizer settings");

  const LanObjective objective(frames, cfg);
  if (objective.positive_count() == 0)
    throw std::invalid_argument("train_lan: no positive training samples");

  LanTrainingResult result;
  LanModel &model = result.model;
  model.gap = cfg.gap;
  objective.fit_normalization(model);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> init(0.0, cfg.init_sigma);
  for (auto &row : model.weights)
    for (auto &w : row)
      w = init(rng);

  LanObjective::Gradient grad;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    result.loss_history.push_back(objective.loss_and_gradient(model, grad));
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t k = 0; k < kFeatureDim; ++k)
        model.weights[c][k] -= cfg.learning_rate * grad.weights[c][k];
      model.bias[c] -= cfg.learning_rate * grad.bias[c];
    }
  }
  result.loss_history.push_back(objective.loss(model));
  return result;
}

std::vector<BoundingBox> anticipate(Strategy strategy, const LanModel *model,
                                    std::span<const LanInput> detections, double image_width,
                                    double image_height) {
  std::vector<BoundingBox> out;
  if (strategy == Strategy::kNone)
    return out;
  if (strategy == Strategy::kTrainedLan && model == nullptr)
    throw std::invalid_argument("anticipate: trained strategy requires a model");

  out.reserve(detections.size());
  for (const auto &det : detections) {
    BoundingBox box = det.box;
    if (strategy == Strategy::kTrainedLan && box.has_positive_area())
      box = decode_delta(box, model->predict(lan_feature(det, image_width, image_height)));
    out.push_back(clip(box, image_width, image_height));
  }
  return out;
}

std::vector<BoundingBox> augment_proposals(std::span<const BoundingBox> proposals,
                                           std::span<const BoundingBox> anticipated) {
  std::vector<BoundingBox> out(proposals.begin(), proposals.end());
  for (const auto &box : anticipated) {
    if (std::find(out.begin(), out.end(), box) == out.end())
      out.push_back(box);
  }
  return out;
}

} // namespace cpla::anticipation
