#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "patchseg/errors.hpp"
#include "patchseg/raster.hpp"

namespace patchseg {

struct ScorerCapabilities {
  int patch_size = 0;  // 0: any size
  bool deterministic = true;
};

// The pixels are what a model sees; image_id and origin identify the patch
// for scorers that need it (the oracle) and for error reporting.
struct PatchRequest {
  std::string_view image_id;
  Origin origin;
  const Raster& pixels;
};

/// Maps an RGB patch to a same-size tumor-probability map. One instance is
/// driven by one worker at a time.
class PatchScorer {
 public:
  virtual ~PatchScorer() = default;

  virtual ProbMap score(const PatchRequest& request) = 0;
  virtual ScorerCapabilities capabilities() const = 0;
};

using ScorerFactory = std::function<std::unique_ptr<PatchScorer>()>;

/// Raised by run_inference when a scorer fails; keeps the failing patch.
class ScorerFailure : public Error {
 public:
  ScorerFailure(std::string image_id, Origin origin, ErrorCode cause, const std::string& message);

  const std::string& image_id() const noexcept { return image_id_; }
  Origin origin() const noexcept { return origin_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string image_id_;
  Origin origin_;
  ErrorCode cause_;
};

class ConstantScorer final : public PatchScorer {
 public:
  // Throws InvalidProbability unless p in [0,1].
  explicit ConstantScorer(float p);

  ProbMap score(const PatchRequest& request) override;
  ScorerCapabilities capabilities() const override { return {0, true}; }

 private:
  float p_;
};

// Returns the ground-truth mask patch for (image_id, origin, patch_size);
// throws UnknownPatch when it has none.
using TruthLookup = std::function<BinaryMask(std::string_view image_id, Origin origin, int patch_size)>;

TruthLookup truth_lookup_from(std::shared_ptr<const std::map<std::string, BinaryMask>> masks);

/// Ground truth pushed toward 0.5 by seeded uniform noise in [0, amplitude]:
/// tumor pixels get 1 - u, background pixels u. With amplitude < 0.5 a 0.5
/// threshold recovers the truth. Noise depends only on (seed, image, origin).
class OracleScorer final : public PatchScorer {
 public:
  // Throws InvalidArgument unless amplitude in [0, 0.5).
  OracleScorer(TruthLookup lookup, double noise_amplitude, std::uint64_t seed);

  ProbMap score(const PatchRequest& request) override;
  ScorerCapabilities capabilities() const override { return {0, true}; }

 private:
  TruthLookup lookup_;
  double amplitude_;
  std::uint64_t seed_;
};

struct ExternalScorerOptions {
  std::string command;  // run as /bin/sh -c "exec <command>"
  std::chrono::milliseconds timeout{30000};
  int patch_size = 0;
  bool deterministic = true;
};

/// Scores patches in a long-lived child process speaking PSRQ/PSRS over its
/// stdin/stdout. Any failure (crash, timeout, protocol violation, probability
/// outside [0,1]) is thrown and leaves the instance unusable.
class ExternalScorer final : public PatchScorer {
 public:
  explicit ExternalScorer(ExternalScorerOptions options);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  ProbMap score(const PatchRequest& request) override;
  ScorerCapabilities capabilities() const override {
    return {options_.patch_size, options_.deterministic};
  }

  int pid() const noexcept { return pid_; }

 private:
  void spawn();
  void shutdown(bool force);
  [[noreturn]] void fail(ErrorCode code, const std::string& message);

  ExternalScorerOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool broken_ = false;
};

}  // namespace patchseg
