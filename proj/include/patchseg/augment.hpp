#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>

#include "patchseg/raster.hpp"

namespace patchseg {

// Fixed application order: geometric transforms first, then photometric.
enum class Transform : int {
  Rot90,
  FlipHorizontal,
  FlipVertical,
  Rotate,
  Scale,
  Gamma,
  Contrast,
  Equalize,
  Solarize,
  HsvShift,
  Blur,
};
inline constexpr int kTransformCount = 11;

std::string_view to_string(Transform t);
bool is_geometric(Transform t);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct AugmentationConfig {
  std::array<double, kTransformCount> probability = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5,
                                                     0.5, 0.5, 0.5, 0.5, 0.5};
  Interval rotation_degrees{-45.0, 45.0};
  int rot90_min_turns = 1;
  int rot90_max_turns = 3;
  Interval gamma{0.7, 1.5};
  Interval contrast{0.75, 1.25};
  Interval solarize_threshold{128.0, 255.0};
  double hue_shift_degrees = 10.0;
  double saturation_shift = 0.15;  // relative, +-
  double value_shift = 0.15;       // relative, +-
  Interval blur_sigma{0.1, 2.0};
  Interval scale{0.8, 1.25};

  double& p(Transform t) { return probability[static_cast<int>(t)]; }
  double p(Transform t) const { return probability[static_cast<int>(t)]; }

  void set_all_probabilities(double value) { probability.fill(value); }

  // Throws InvalidConfig.
  void validate() const;
};

/// Gate outcomes and parameters drawn for one augmentation call.
struct AugmentationDraw {
  std::array<bool, kTransformCount> applied{};
  int rot90_turns = 0;
  double angle_degrees = 0.0;
  double scale = 1.0;
  double gamma = 1.0;
  double contrast = 1.0;
  int solarize_threshold = 255;
  double hue_shift_degrees = 0.0;
  double saturation_scale = 1.0;
  double value_scale = 1.0;
  double blur_sigma = 0.0;

  bool on(Transform t) const { return applied[static_cast<int>(t)]; }
  bool any() const;
};

// Every gate and parameter is drawn on every call, so a gate outcome never
// shifts the parameters of later transforms.
AugmentationDraw draw_augmentation(const AugmentationConfig& config, std::uint64_t seed);

// Square patch and equally sized mask. Geometric transforms move both
// (bilinear for the image, nearest for the mask); photometric ones touch the
// image only. Throws ShapeMismatch.
std::pair<Raster, BinaryMask> apply_augmentation(const Raster& patch, const BinaryMask& mask,
                                                 const AugmentationDraw& draw);
std::pair<Raster, BinaryMask> apply_augmentation(const Raster& patch, const BinaryMask& mask,
                                                 const AugmentationConfig& config,
                                                 std::uint64_t seed);

// Individual transforms.
Raster rotate90(const Raster& image, int counterclockwise_turns);
BinaryMask rotate90(const BinaryMask& mask, int counterclockwise_turns);
Raster flip_horizontal(const Raster& image);
BinaryMask flip_horizontal(const BinaryMask& mask);
Raster flip_vertical(const Raster& image);
BinaryMask flip_vertical(const BinaryMask& mask);
// Counterclockwise about the patch center; exposed corners reflect-padded.
std::pair<Raster, BinaryMask> rotate(const Raster& image, const BinaryMask& mask, double degrees);
// Resize by factor, then center-crop or reflect-pad back to the input size.
std::pair<Raster, BinaryMask> rescale(const Raster& image, const BinaryMask& mask, double factor);
Raster adjust_gamma(const Raster& image, double gamma);
Raster adjust_contrast(const Raster& image, double factor);
Raster equalize_histogram(const Raster& image);
Raster solarize(const Raster& image, int threshold);
Raster shift_hsv(const Raster& image, double hue_degrees, double saturation_scale,
                 double value_scale);
Raster gaussian_blur(const Raster& image, double sigma);

}  // namespace patchseg
