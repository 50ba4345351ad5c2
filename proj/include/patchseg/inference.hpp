#pragma once

#include <span>
#include <string>

#include "patchseg/raster.hpp"
#include "patchseg/scorer.hpp"
#include "patchseg/tiling.hpp"

namespace patchseg {

struct InferenceOptions {
  int patch_size = kDefaultPatchSize;
  int stride = kDefaultStride;
  double sigma = kDefaultSigma;
};

struct InferenceResult {
  ProbMap probs;
  PatchGrid grid;
  double scoring_seconds = 0.0;
  double stitching_seconds = 0.0;
};

// build_grid -> extract_patch -> score -> stitch. Patches are spread over
// the given scorers (one worker thread each); results are stitched in grid
// order, so the output is independent of the scorer count. Scorer errors
// surface as ScorerFailure carrying the patch origin.
InferenceResult run_inference(const Raster& image, std::string_view image_id,
                              std::span<PatchScorer* const> scorers,
                              const InferenceOptions& options = {});

ProbMap run_inference(const Raster& image, PatchScorer& scorer,
                      const InferenceOptions& options = {}, std::string_view image_id = {});

}  // namespace patchseg
