#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patchseg/manifest.hpp"
#include "patchseg/raster.hpp"
#include "patchseg/tiling.hpp"

namespace patchseg {

inline constexpr double kDefaultWeightFloor = 0.05;
inline constexpr std::size_t kDefaultSamplesPerEpoch = 17000;

struct PatchEntry {
  std::string image_id;
  Origin origin;
  double tumor_fraction = 0.0;
  double weight = 0.0;
};

/// One entry per (image, grid origin); weight > 0 and non-decreasing in
/// tumor_fraction.
struct WeightedPatchIndex {
  std::vector<PatchEntry> entries;
};

/// Ordered draws (indices into the index's entries) for one training epoch.
struct EpochPlan {
  std::uint64_t seed = 0;
  std::vector<std::size_t> draws;
};

double tumor_fraction(const BinaryMask& mask);

// max(tumor_fraction, floor)
double compute_patch_weight(const BinaryMask& mask_patch, double floor = kDefaultWeightFloor);

// Tiles each (image_id, mask) pair with build_grid and weights every patch.
WeightedPatchIndex build_index(std::span<const std::pair<std::string, BinaryMask>> masks,
                               int patch_size = kDefaultPatchSize, int stride = kDefaultStride,
                               double floor = kDefaultWeightFloor);

// Loads images and masks from disk. Throws DimensionMismatch when a mask and
// its image differ in size.
WeightedPatchIndex build_index(std::span<const ManifestEntry> entries,
                               int patch_size = kDefaultPatchSize, int stride = kDefaultStride,
                               double floor = kDefaultWeightFloor);

// Independent draws with replacement, P(i) = w_i / sum(w). Throws EmptyIndex.
EpochPlan build_epoch_plan(const WeightedPatchIndex& index,
                           std::size_t samples_per_epoch = kDefaultSamplesPerEpoch,
                           std::uint64_t seed = 0);

// One JSON object per line: {image_id, origin_row, origin_col, draw_index}.
std::string epoch_plan_to_jsonl(const WeightedPatchIndex& index, const EpochPlan& plan);

}  // namespace patchseg
