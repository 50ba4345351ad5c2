#include "patchseg/sampling.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "patchseg/errors.hpp"
#include "patchseg/rng.hpp"

namespace patchseg {

double tumor_fraction(const BinaryMask& mask) {
  if (mask.size() == 0) return 0.0;
  return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

double compute_patch_weight(const BinaryMask& mask_patch, double floor) {
  return std::max(tumor_fraction(mask_patch), floor);
}

WeightedPatchIndex build_index(std::span<const std::pair<std::string, BinaryMask>> masks,
                               int patch_size, int stride, double floor) {
  if (!(floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "weight floor must be positive");
  WeightedPatchIndex index;
  for (const auto& [id, mask] : masks) {
    const PatchGrid grid = build_grid(mask.height(), mask.width(), patch_size, stride);
    for (const Origin o : grid.origins) {
      const BinaryMask patch = extract_patch(mask, o, patch_size);
      const double fraction = tumor_fraction(patch);
      index.entries.push_back({id, o, fraction, std::max(fraction, floor)});
    }
  }
  return index;
}

WeightedPatchIndex build_index(std::span<const ManifestEntry> entries, int patch_size,
                               int stride, double floor) {
  std::vector<std::pair<std::string, BinaryMask>> masks;
  masks.reserve(entries.size());
  for (const auto& e : entries) {
    const Raster image = load_image(e.image_path);
    BinaryMask mask = load_mask(e.mask_path);
    if (image.width() != mask.width() || image.height() != mask.height()) {
      throw Error(ErrorCode::DimensionMismatch,
                  e.image_id + ": mask " + std::to_string(mask.height()) + "x" +
                      std::to_string(mask.width()) + " vs image " +
                      std::to_string(image.height()) + "x" + std::to_string(image.width()));
    }
    masks.emplace_back(e.image_id, std::move(mask));
  }
  return build_index(std::span<const std::pair<std::string, BinaryMask>>(masks), patch_size,
                     stride, floor);
}

EpochPlan build_epoch_plan(const WeightedPatchIndex& index, std::size_t samples_per_epoch,
                           std::uint64_t seed) {
  if (index.entries.empty()) throw Error(ErrorCode::EmptyIndex, "no patches to sample from");

  std::vector<double> cumulative;
  cumulative.reserve(index.entries.size());
  double total = 0.0;
  for (const auto& e : index.entries) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(ErrorCode::InvalidArgument, "patch weight must be positive and finite");
    }
    total += e.weight;
    cumulative.push_back(total);
  }

  EpochPlan plan;
  plan.seed = seed;
  plan.draws.reserve(samples_per_epoch);
  Rng rng(seed);
  for (std::size_t i = 0; i < samples_per_epoch; ++i) {
    const double u = rng.uniform01() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    plan.draws.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return plan;
}

std::string epoch_plan_to_jsonl(const WeightedPatchIndex& index, const EpochPlan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.draws.size(); ++i) {
    const auto& e = index.entries.at(plan.draws[i]);
    nlohmann::ordered_json j;
    j["image_id"] = e.image_id;
    j["origin_row"] = e.origin.row;
    j["origin_col"] = e.origin.col;
    j["draw_index"] = i;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace patchseg
