#include "patchseg/metrics.hpp"

#include <cmath>

#include "patchseg/errors.hpp"

namespace patchseg {

namespace {

kernels::Confusion count(const BinaryMask& pred, const BinaryMask& truth) {
  if (!same_shape(pred, truth)) {
    throw Error(ErrorCode::ShapeMismatch,
                "prediction " + std::to_string(pred.height()) + "x" + std::to_string(pred.width()) +
                    " vs truth " + std::to_string(truth.height()) + "x" + std::to_string(truth.width()));
  }
  return kernels::confusion(pred.data(), truth.data());
}

kernels::Confusion complement(const kernels::Confusion& c) { return {c.tn, c.fn, c.fp, c.tp}; }

}  // namespace

double dsc_from(const kernels::Confusion& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double jsc_from(const kernels::Confusion& c) {
  const auto uni = c.tp + c.fp + c.fn;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.tp) / static_cast<double>(uni);
}

double dsc(const BinaryMask& pred, const BinaryMask& truth) { return dsc_from(count(pred, truth)); }

double jsc(const BinaryMask& pred, const BinaryMask& truth) { return jsc_from(count(pred, truth)); }

double mean_class_dice(const BinaryMask& pred, const BinaryMask& truth) {
  return metric_report(pred, truth).mean_class_dice;
}

double challenge_score(const BinaryMask& pred, const BinaryMask& truth) {
  return metric_report(pred, truth).challenge_score;
}

MetricReport metric_report(const kernels::Confusion& c) {
  MetricReport r;
  r.dsc = dsc_from(c);
  r.jsc = jsc_from(c);
  r.challenge_score = 0.5 * r.dsc + 0.5 * r.jsc;
  r.dice_tumor = r.dsc;
  r.dice_background = dsc_from(complement(c));
  r.mean_class_dice = 0.5 * (r.dice_background + r.dice_tumor);
  return r;
}

MetricReport metric_report(const BinaryMask& pred, const BinaryMask& truth) {
  return metric_report(count(pred, truth));
}

MetricReport mean_report(std::span<const MetricReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports to average");
  MetricReport m;
  for (const auto& r : reports) {
    m.dsc += r.dsc;
    m.jsc += r.jsc;
    m.challenge_score += r.challenge_score;
    m.dice_background += r.dice_background;
    m.dice_tumor += r.dice_tumor;
    m.mean_class_dice += r.mean_class_dice;
  }
  const double n = static_cast<double>(reports.size());
  m.dsc /= n;
  m.jsc /= n;
  m.challenge_score /= n;
  m.dice_background /= n;
  m.dice_tumor /= n;
  m.mean_class_dice /= n;
  return m;
}

FoldSummary aggregate_folds(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no fold scores");
  double sum = 0.0;
  for (const double v : values) sum += v;
  FoldSummary s;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (const double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

nlohmann::ordered_json report_to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["dsc"] = r.dsc;
  j["jsc"] = r.jsc;
  j["challenge_score"] = r.challenge_score;
  j["per_class_dice"]["background"] = r.dice_background;
  j["per_class_dice"]["tumor"] = r.dice_tumor;
  j["mean_class_dice"] = r.mean_class_dice;
  return j;
}

MetricReport report_from_json(const nlohmann::json& j) {
  try {
    MetricReport r;
    r.dsc = j.at("dsc").get<double>();
    r.jsc = j.at("jsc").get<double>();
    r.challenge_score = j.at("challenge_score").get<double>();
    r.dice_background = j.at("per_class_dice").at("background").get<double>();
    r.dice_tumor = j.at("per_class_dice").at("tumor").get<double>();
    r.mean_class_dice = j.at("mean_class_dice").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed metric report: ") + e.what());
  }
}

}  // namespace patchseg
