#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchseg/kernels.hpp"
#include "patchseg/raster.hpp"

namespace patchseg {

// Empty prediction and empty truth score 1.0 for both coefficients.
double dsc(const BinaryMask& pred, const BinaryMask& truth);
double jsc(const BinaryMask& pred, const BinaryMask& truth);
// Mean of tumor-class and background-class Dice.
double mean_class_dice(const BinaryMask& pred, const BinaryMask& truth);
// 0.5 dsc + 0.5 jsc
double challenge_score(const BinaryMask& pred, const BinaryMask& truth);

double dsc_from(const kernels::Confusion& c);
double jsc_from(const kernels::Confusion& c);

struct MetricReport {
  double dsc = 0.0;
  double jsc = 0.0;
  double challenge_score = 0.0;
  double dice_background = 0.0;
  double dice_tumor = 0.0;
  double mean_class_dice = 0.0;
};

MetricReport metric_report(const kernels::Confusion& c);
// Throws ShapeMismatch.
MetricReport metric_report(const BinaryMask& pred, const BinaryMask& truth);

// Field-wise arithmetic mean. Throws EmptyInput.
MetricReport mean_report(std::span<const MetricReport> reports);

struct FoldSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for a single value
};

// Throws EmptyInput.
FoldSummary aggregate_folds(std::span<const double> values);

// Keys: dsc, jsc, challenge_score, per_class_dice.{background,tumor}, mean_class_dice.
nlohmann::ordered_json report_to_json(const MetricReport& r);
MetricReport report_from_json(const nlohmann::json& j);

}  // namespace patchseg
