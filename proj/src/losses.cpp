#include "patchseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "patchseg/errors.hpp"

namespace patchseg {

void LossConfig::validate() const {
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "label_smoothing must be in [0,1)");
  }
  if (!(aux_head_weight >= 0.0)) throw Error(ErrorCode::InvalidConfig, "aux_head_weight must be >= 0");
  if (!(dice_epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "dice_epsilon must be > 0");
  if (hard_pixel_top_k && !(*hard_pixel_top_k > 0.0 && *hard_pixel_top_k <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "hard_pixel_top_k must be in (0,1]");
  }
}

void LrScheduleConfig::validate() const {
  if (total_epochs < 1) throw Error(ErrorCode::InvalidConfig, "total_epochs must be >= 1");
  if (warmup_epochs < 0 || warmup_epochs >= total_epochs) {
    throw Error(ErrorCode::InvalidConfig, "warmup_epochs must be in [0, total_epochs)");
  }
  if (!(lr_min >= 0.0 && lr_min <= lr_max)) {
    throw Error(ErrorCode::InvalidConfig, "need 0 <= lr_min <= lr_max");
  }
}

double dice_loss(std::span<const float> probs, std::span<const std::uint8_t> target,
                 double epsilon) {
  if (probs.size() != target.size()) {
    throw Error(ErrorCode::ShapeMismatch, "dice_loss: probs and target differ in size");
  }
  double intersection = 0.0;
  double prob_sum = 0.0;
  double target_sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    const double t = target[i];
    intersection += p * t;
    prob_sum += p;
    target_sum += t;
  }
  return 1.0 - (2.0 * intersection + epsilon) / (prob_sum + target_sum + epsilon);
}

double ce_loss_smoothed(std::span<const ClassProbs> probs, std::span<const std::uint8_t> target,
                        double smoothing, std::optional<double> top_k) {
  if (probs.size() != target.size()) {
    throw Error(ErrorCode::ShapeMismatch, "ce_loss: probs and target differ in size");
  }
  if (probs.empty()) throw Error(ErrorCode::EmptyInput, "ce_loss: no pixels");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing must be in [0,1)");
  }
  constexpr double kClasses = 2.0;
  const double off = smoothing / kClasses;
  const double on = 1.0 - smoothing + off;

  std::vector<double> losses(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto& p = probs[i];
    for (const double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::InvalidProbability, "pixel " + std::to_string(i) + ": " + std::to_string(v));
      }
    }
    if (std::abs(p[0] + p[1] - 1.0) > 1e-6) {
      throw Error(ErrorCode::InvalidProbability, "pixel " + std::to_string(i) + ": probabilities do not sum to 1");
    }
    if (target[i] > 1) throw Error(ErrorCode::InvalidMaskValues, "target must be 0 or 1");
    double loss = 0.0;
    for (int c = 0; c < 2; ++c) {
      const double q = (c == target[i]) ? on : off;
      if (q > 0.0) loss -= q * std::log(p[c]);
    }
    losses[i] = loss;
  }

  std::size_t keep = losses.size();
  if (top_k) {
    if (!(*top_k > 0.0 && *top_k <= 1.0)) throw Error(ErrorCode::InvalidArgument, "top_k must be in (0,1]");
    keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(*top_k * losses.size())));
    std::nth_element(losses.begin(), losses.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                     losses.end(), std::greater<>());
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < keep; ++i) sum += losses[i];
  return sum / static_cast<double>(keep);
}

double total_loss(double main_dice, double main_ce, double aux_dice, double aux_ce,
                  double aux_weight) {
  if (main_dice < 0 || main_ce < 0 || aux_dice < 0 || aux_ce < 0 || aux_weight < 0) {
    throw Error(ErrorCode::InvalidArgument, "loss components must be non-negative");
  }
  return (main_dice + main_ce) + aux_weight * (aux_dice + aux_ce);
}

double lr_at(int epoch, const LrScheduleConfig& config) {
  config.validate();
  const int total = config.total_epochs;
  const int warmup = config.warmup_epochs;
  if (epoch < 0 || epoch >= total) {
    throw Error(ErrorCode::EpochOutOfRange,
                "epoch " + std::to_string(epoch) + " not in [0, " + std::to_string(total) + ")");
  }
  if (epoch < warmup) return config.lr_max * (static_cast<double>(epoch + 1) / warmup);
  const int span = total - 1 - warmup;
  if (span == 0) return config.lr_min;
  const double progress = static_cast<double>(epoch - warmup) / span;
  const double c = std::cos(std::numbers::pi * progress);
  const double range = config.lr_max - config.lr_min;
  // Anchor each half at its own endpoint so lr_max and lr_min come out exact.
  if (progress <= 0.5) return config.lr_max - 0.5 * range * (1.0 - c);
  return config.lr_min + 0.5 * range * (1.0 + c);
}

}  // namespace patchseg
