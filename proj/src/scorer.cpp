#include "patchseg/scorer.hpp"

#include <utility>
#include <vector>

#include "patchseg/rng.hpp"
#include "patchseg/tiling.hpp"

namespace patchseg {

ScorerFailure::ScorerFailure(std::string image_id, Origin origin, ErrorCode cause,
                             const std::string& message)
    : Error(ErrorCode::ScorerError, image_id + " patch (" + std::to_string(origin.row) + "," +
                                        std::to_string(origin.col) + "): " + message),
      image_id_(std::move(image_id)),
      origin_(origin),
      cause_(cause) {}

ConstantScorer::ConstantScorer(float p) : p_(p) {
  if (!(p >= 0.0f && p <= 1.0f)) {
    throw Error(ErrorCode::InvalidProbability, "constant scorer value " + std::to_string(p));
  }
}

ProbMap ConstantScorer::score(const PatchRequest& request) {
  return ProbMap(request.pixels.width(), request.pixels.height(), p_);
}

TruthLookup truth_lookup_from(std::shared_ptr<const std::map<std::string, BinaryMask>> masks) {
  return [masks = std::move(masks)](std::string_view image_id, Origin origin, int patch_size) {
    const auto it = masks->find(std::string(image_id));
    if (it == masks->end()) {
      throw Error(ErrorCode::UnknownPatch, "no ground truth for image " + std::string(image_id));
    }
    try {
      return extract_patch(it->second, origin, patch_size);
    } catch (const Error& e) {
      throw Error(ErrorCode::UnknownPatch, std::string(image_id) + ": " + e.what());
    }
  };
}

OracleScorer::OracleScorer(TruthLookup lookup, double noise_amplitude, std::uint64_t seed)
    : lookup_(std::move(lookup)), amplitude_(noise_amplitude), seed_(seed) {
  if (!(noise_amplitude >= 0.0 && noise_amplitude < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "oracle noise amplitude must be in [0, 0.5)");
  }
}

ProbMap OracleScorer::score(const PatchRequest& request) {
  const int size = request.pixels.width();
  if (request.pixels.height() != size) {
    throw Error(ErrorCode::ShapeMismatch, "oracle scorer expects square patches");
  }
  const BinaryMask truth = lookup_(request.image_id, request.origin, size);
  std::uint64_t s = mix_seed(seed_, hash_string(request.image_id));
  s = mix_seed(s, static_cast<std::uint64_t>(request.origin.row));
  s = mix_seed(s, static_cast<std::uint64_t>(request.origin.col));
  Rng rng(s);
  std::vector<float> probs(truth.size());
  const auto t = truth.data();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double u = amplitude_ > 0.0 ? rng.uniform(0.0, amplitude_) : 0.0;
    probs[i] = static_cast<float>(t[i] ? 1.0 - u : u);
  }
  return ProbMap(size, size, std::move(probs));
}

}  // namespace patchseg
