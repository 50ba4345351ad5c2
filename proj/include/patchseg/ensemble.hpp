#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "patchseg/metrics.hpp"
#include "patchseg/raster.hpp"

namespace patchseg {

// Per-pixel majority of exactly three masks. Throws WrongModelCount, ShapeMismatch.
BinaryMask hard_vote(std::span<const BinaryMask> masks);

// Per-pixel mean of n >= 1 maps. Throws EmptyInput, ShapeMismatch.
ProbMap prob_average(std::span<const ProbMap> maps);

struct ImageMetrics {
  std::string image_id;
  MetricReport report;
};

struct FoldEvaluation {
  std::vector<ImageMetrics> per_image;  // sorted by image_id
  MetricReport mean;                    // per-image metrics averaged
  MetricReport pooled;                  // confusion counts pooled over images
};

// Throws IdSetMismatch, or ShapeMismatch naming the offending id.
FoldEvaluation evaluate_images(const std::map<std::string, BinaryMask>& predictions,
                               const std::map<std::string, BinaryMask>& truths);

MetricReport evaluate_fold(const std::map<std::string, BinaryMask>& predictions,
                           const std::map<std::string, BinaryMask>& truths);

}  // namespace patchseg
