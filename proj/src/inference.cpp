#include "patchseg/inference.hpp"

#include <chrono>
#include <optional>
#include <thread>
#include <vector>

#include "patchseg/errors.hpp"

namespace patchseg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PatchOutcome {
  std::optional<ProbMap> prob;
  std::optional<ScorerFailure> failure;
};

PatchOutcome score_one(PatchScorer& scorer, const Raster& image, std::string_view image_id,
                       Origin origin, int patch_size) {
  PatchOutcome out;
  try {
    const Raster patch = extract_patch(image, origin, patch_size);
    ProbMap prob = scorer.score(PatchRequest{image_id, origin, patch});
    if (prob.width() != patch_size || prob.height() != patch_size) {
      throw Error(ErrorCode::ShapeMismatch, "scorer returned " + std::to_string(prob.height()) +
                                                "x" + std::to_string(prob.width()));
    }
    prob.validate();
    out.prob = std::move(prob);
  } catch (const Error& e) {
    out.failure.emplace(std::string(image_id), origin, e.code(), e.what());
  } catch (const std::exception& e) {
    out.failure.emplace(std::string(image_id), origin, ErrorCode::ScorerError, e.what());
  }
  return out;
}

}  // namespace

InferenceResult run_inference(const Raster& image, std::string_view image_id,
                              std::span<PatchScorer* const> scorers,
                              const InferenceOptions& options) {
  if (scorers.empty()) throw Error(ErrorCode::InvalidArgument, "no scorers supplied");
  InferenceResult result;
  result.grid = build_grid(image.height(), image.width(), options.patch_size, options.stride);
  const GaussianKernel kernel = gaussian_kernel(options.patch_size, options.sigma);
  const auto& origins = result.grid.origins;

  std::vector<PatchOutcome> outcomes(origins.size());
  const auto t0 = Clock::now();
  const std::size_t workers = std::min(scorers.size(), origins.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < origins.size(); ++k) {
      outcomes[k] = score_one(*scorers[0], image, image_id, origins[k], options.patch_size);
      if (outcomes[k].failure) break;
    }
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t k = w; k < origins.size(); k += workers) {
          outcomes[k] = score_one(*scorers[w], image, image_id, origins[k], options.patch_size);
          if (outcomes[k].failure) break;
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  result.scoring_seconds = seconds_since(t0);

  // Lowest failing patch index wins so the reported error is reproducible.
  for (const auto& o : outcomes) {
    if (o.failure) throw *o.failure;
  }

  std::vector<PatchProb> patch_probs;
  patch_probs.reserve(origins.size());
  for (std::size_t k = 0; k < origins.size(); ++k) {
    patch_probs.push_back({origins[k], std::move(*outcomes[k].prob)});
  }
  const auto t1 = Clock::now();
  result.probs = stitch(patch_probs, result.grid, kernel, image.height(), image.width());
  result.stitching_seconds = seconds_since(t1);
  return result;
}

ProbMap run_inference(const Raster& image, PatchScorer& scorer, const InferenceOptions& options,
                      std::string_view image_id) {
  PatchScorer* const one[] = {&scorer};
  return run_inference(image, image_id, one, options).probs;
}

}  // namespace patchseg
