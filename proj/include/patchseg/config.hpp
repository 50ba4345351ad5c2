#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "patchseg/augment.hpp"
#include "patchseg/losses.hpp"
#include "patchseg/sampling.hpp"
#include "patchseg/tiling.hpp"

namespace patchseg {

/// Every knob of a pipeline run. Defaults are the published method's
/// constants where it states them (512 px patches, 50% overlap, 17000 draws
/// per epoch, 0.5 cutoff, 40 epochs) and documented choices elsewhere.
struct PipelineConfig {
  int patch_size = kDefaultPatchSize;
  int stride = kDefaultStride;
  double kernel_sigma = kDefaultSigma;
  float threshold = kDefaultCutoff;
  std::size_t samples_per_epoch = kDefaultSamplesPerEpoch;
  double weight_floor = kDefaultWeightFloor;
  AugmentationConfig augmentation;
  LossConfig loss;
  LrScheduleConfig schedule;
  std::uint64_t seed = 0;
  int workers = 1;

  // Throws InvalidConfig.
  void validate() const;
};

// TOML subset: `key = value` lines, `[augmentation]`, `[loss]` and
// `[schedule]` sections, `#` comments; values are numbers, booleans or
// double-quoted strings. Unknown keys are errors. Throws InvalidConfig.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json config_to_json(const PipelineConfig& config);

}  // namespace patchseg
