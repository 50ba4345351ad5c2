#pragma once

#include <span>
#include <vector>

#include "patchseg/raster.hpp"

namespace patchseg {

inline constexpr int kDefaultPatchSize = 512;
inline constexpr int kDefaultStride = 256;
inline constexpr double kDefaultSigma = 64.0;
inline constexpr float kDefaultCutoff = 0.5f;

/// Overlapping tiling of an image. Origins are row-major; along each axis
/// they sit at multiples of the stride, plus one window clamped to the far
/// edge when the last stride multiple would leave pixels uncovered.
struct PatchGrid {
  int image_height = 0;
  int image_width = 0;
  int patch_size = 0;
  int stride = 0;
  std::vector<int> row_offsets;
  std::vector<int> col_offsets;
  std::vector<Origin> origins;

  std::size_t size() const noexcept { return origins.size(); }
};

std::vector<int> axis_offsets(int extent, int patch_size, int stride);

// Throws PatchLargerThanImage, or InvalidArgument for a stride outside [1, patch_size].
PatchGrid build_grid(int image_height, int image_width, int patch_size = kDefaultPatchSize,
                     int stride = kDefaultStride);

// Exact copy of the patch_size x patch_size window at origin; throws OutOfBounds.
Raster extract_patch(const Raster& source, Origin origin, int patch_size);
BinaryMask extract_patch(const BinaryMask& source, Origin origin, int patch_size);
ProbMap extract_patch(const ProbMap& source, Origin origin, int patch_size);

/// Separable Gaussian blending weights, peak scaled to 1.0.
struct GaussianKernel {
  int size = 0;
  double sigma = 0.0;
  std::vector<double> weights;  // size x size, row-major

  double at(int row, int col) const { return weights[static_cast<std::size_t>(row) * size + col]; }
};

// weight(i,j) = exp(-((i-c)^2 + (j-c)^2) / (2 sigma^2)), c = (size-1)/2,
// divided by the maximum. Throws InvalidSigma for sigma <= 0.
GaussianKernel gaussian_kernel(int size, double sigma);

/// Running weighted sum used by the serial stitching path.
class StitchAccumulator {
 public:
  StitchAccumulator(int height, int width);

  // Adds kernel-weighted probabilities of one patch.
  void add(Origin origin, std::span<const float> patch, const GaussianKernel& kernel);

  // weighted_sum / weight_sum per pixel, clamped to [0,1]. Throws
  // ShapeMismatch if any pixel never received weight.
  ProbMap finalize() const;

  std::span<const double> weighted_sum() const noexcept { return weighted_sum_; }
  std::span<const double> weight_sum() const noexcept { return weight_sum_; }

 private:
  int height_;
  int width_;
  std::vector<double> weighted_sum_;
  std::vector<double> weight_sum_;
};

struct PatchProb {
  Origin origin;
  ProbMap prob;
};

// Gaussian-weighted average of overlapping patch predictions. Patches may be
// given in any order; they are matched to grid origins and accumulated in
// grid order. Throws MissingPatch or ShapeMismatch.
ProbMap stitch(std::span<const PatchProb> patch_probs, const PatchGrid& grid,
               const GaussianKernel& kernel, int out_height, int out_width);

// Same contract as stitch, computed with the serial reference kernel.
ProbMap stitch_reference(std::span<const PatchProb> patch_probs, const PatchGrid& grid,
                         const GaussianKernel& kernel, int out_height, int out_width);

// mask(p) = 1 iff map(p) > cutoff.
BinaryMask threshold(const ProbMap& map, float cutoff = kDefaultCutoff);

}  // namespace patchseg
