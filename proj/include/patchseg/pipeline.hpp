#pragma once

// File-level pipeline stages behind the command-line tool. Each stage reads
// its inputs from disk and writes its outputs atomically, so any stage can be
// re-run on its own.

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchseg/config.hpp"
#include "patchseg/folds.hpp"
#include "patchseg/manifest.hpp"
#include "patchseg/metrics.hpp"
#include "patchseg/scorer.hpp"

namespace patchseg {

namespace fs = std::filesystem;

FoldPlan cmd_split(const fs::path& manifest_path, const fs::path& out_path);

// Returns the number of draws written.
std::size_t cmd_plan_epoch(const fs::path& manifest_path, int fold_id,
                           const PipelineConfig& config, const fs::path& out_path);

// "builtin:constant:<p>", "builtin:oracle:<amplitude>[:<seed>]", or an
// external command line speaking PSRQ/PSRS. Oracle truth comes from the
// manifest masks of `image_ids`.
ScorerFactory make_scorer_factory(const std::string& spec, const DatasetManifest& manifest,
                                  const std::vector<std::string>& image_ids, std::uint64_t seed,
                                  std::chrono::milliseconds timeout);

struct InferArgs {
  fs::path manifest_path;
  int fold_id = 0;
  bool all_images = false;  // score every manifest image, not just the fold's validation set
  std::string scorer_spec;
  std::chrono::milliseconds timeout{30000};
  PipelineConfig config;
  fs::path out_dir;
};

struct InferSummary {
  std::vector<std::string> succeeded;
  std::map<std::string, std::string> failed;  // image_id -> error
  nlohmann::ordered_json log;

  bool ok() const { return failed.empty(); }
};

// Writes <id>.pmap, <id>.png and infer_log.json under out_dir. Scorer
// failures are recorded per image and do not stop the run.
InferSummary cmd_infer(const InferArgs& args);

enum class EnsembleMethod { HardVote, ProbAverage };

EnsembleMethod parse_method(const std::string& name);
std::string to_string(EnsembleMethod m);

// Hard vote reads <id>.png masks from exactly three directories; probability
// averaging reads <id>.pmap maps. Writes <id>.png (and <id>.pmap for
// averaging) plus ensemble_manifest.json. Returns the ensembled ids.
std::vector<std::string> cmd_ensemble(EnsembleMethod method, const std::vector<fs::path>& input_dirs,
                                      const fs::path& out_dir, float threshold = kDefaultCutoff);

struct EvaluateArgs {
  fs::path pred_dir;
  std::optional<fs::path> truth_dir;   // <id>.png masks
  std::optional<fs::path> manifest;    // or masks from a manifest
  std::optional<int> fold_id;          // restrict manifest truths to one fold's validation ids
  bool pooled = false;
  fs::path out_path;
};

// Writes {"report", "mean", "pooled", "per_image"} JSON; returns "report".
MetricReport cmd_evaluate(const EvaluateArgs& args);

// Across-fold mean and sample std of each metric present in every report.
nlohmann::ordered_json cmd_aggregate(const std::vector<fs::path>& report_paths,
                                     const fs::path& out_path);

// Request/response byte fixtures for adapter conformance: a deterministic
// RGB patch and the red-channel/255 response to it.
void cmd_wire_fixture(const fs::path& out_dir, int size = 8);

// <id> -> path for every regular file with the given extension.
std::map<std::string, fs::path> list_by_id(const fs::path& dir, const std::string& extension);

}  // namespace patchseg
