#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace patchseg {

struct LossConfig {
  double label_smoothing = 0.1;
  double aux_head_weight = 0.4;
  double dice_epsilon = 1e-6;
  // Hard-pixel CE: average only the hardest fraction of per-pixel losses.
  // One possible reading of "maximal restriction"; off unless set.
  std::optional<double> hard_pixel_top_k;

  void validate() const;
};

struct LrScheduleConfig {
  int total_epochs = 40;
  int warmup_epochs = 3;
  double lr_max = 1e-4;
  double lr_min = 0.0;

  void validate() const;
};

// 1 - (2 sum(p t) + eps) / (sum(p) + sum(t) + eps). Throws ShapeMismatch.
double dice_loss(std::span<const float> probs, std::span<const std::uint8_t> target,
                 double epsilon = 1e-6);

// Per-pixel {background, tumor} probabilities.
using ClassProbs = std::array<double, 2>;

// Mean over pixels of -sum_c q_c log p_c with targets smoothed to
// q = (1 - eps) onehot + eps / 2. With top_k set, only the ceil(k N) largest
// per-pixel losses are averaged. Throws ShapeMismatch, InvalidProbability.
double ce_loss_smoothed(std::span<const ClassProbs> probs, std::span<const std::uint8_t> target,
                        double smoothing, std::optional<double> top_k = std::nullopt);

// (main_dice + main_ce) + aux_weight (aux_dice + aux_ce)
double total_loss(double main_dice, double main_ce, double aux_dice, double aux_ce,
                  double aux_weight);

// Linear warmup lr_max (e+1)/W for e < W, then cosine from lr_max at e = W to
// lr_min at e = T-1. Throws EpochOutOfRange.
double lr_at(int epoch, const LrScheduleConfig& config);

}  // namespace patchseg
