#include "patchseg/ensemble.hpp"

#include "patchseg/errors.hpp"
#include "patchseg/kernels.hpp"

namespace patchseg {

BinaryMask hard_vote(std::span<const BinaryMask> masks) {
  if (masks.size() != 3) {
    throw Error(ErrorCode::WrongModelCount, "hard vote needs 3 masks, got " + std::to_string(masks.size()));
  }
  if (!same_shape(masks[0], masks[1]) || !same_shape(masks[0], masks[2])) {
    throw Error(ErrorCode::ShapeMismatch, "hard vote inputs differ in shape");
  }
  std::vector<std::uint8_t> out(masks[0].size());
  kernels::hard_vote3(masks[0].data(), masks[1].data(), masks[2].data(), out);
  return BinaryMask(masks[0].width(), masks[0].height(), std::move(out));
}

ProbMap prob_average(std::span<const ProbMap> maps) {
  if (maps.empty()) throw Error(ErrorCode::EmptyInput, "no probability maps to average");
  std::vector<std::span<const float>> views;
  views.reserve(maps.size());
  for (const auto& m : maps) {
    if (!same_shape(m, maps[0])) throw Error(ErrorCode::ShapeMismatch, "probability maps differ in shape");
    views.push_back(m.data());
  }
  std::vector<float> out(maps[0].size());
  kernels::prob_average(views, out);
  return ProbMap(maps[0].width(), maps[0].height(), std::move(out));
}

FoldEvaluation evaluate_images(const std::map<std::string, BinaryMask>& predictions,
                               const std::map<std::string, BinaryMask>& truths) {
  if (predictions.empty() && truths.empty()) {
    throw Error(ErrorCode::IdSetMismatch, "no images to evaluate");
  }
  for (const auto& [id, mask] : predictions) {
    if (!truths.count(id)) throw Error(ErrorCode::IdSetMismatch, "prediction without truth: " + id);
  }
  for (const auto& [id, mask] : truths) {
    if (!predictions.count(id)) throw Error(ErrorCode::IdSetMismatch, "missing prediction: " + id);
  }

  FoldEvaluation eval;
  std::vector<MetricReport> reports;
  kernels::Confusion pooled;
  for (const auto& [id, pred] : predictions) {
    const auto& truth = truths.at(id);
    if (!same_shape(pred, truth)) throw Error(ErrorCode::ShapeMismatch, "shape mismatch for " + id);
    const auto c = kernels::confusion(pred.data(), truth.data());
    pooled += c;
    eval.per_image.push_back({id, metric_report(c)});
    reports.push_back(eval.per_image.back().report);
  }
  eval.mean = mean_report(reports);
  eval.pooled = metric_report(pooled);
  return eval;
}

MetricReport evaluate_fold(const std::map<std::string, BinaryMask>& predictions,
                           const std::map<std::string, BinaryMask>& truths) {
  return evaluate_images(predictions, truths).mean;
}

}  // namespace patchseg
