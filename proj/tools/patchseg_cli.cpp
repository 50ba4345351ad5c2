// patchseg: split / plan-epoch / infer / ensemble / evaluate / generate.
//
// Exit codes: 0 success, 1 validation or scorer failure, 2 usage error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "patchseg/config.hpp"
#include "patchseg/errors.hpp"
#include "patchseg/pipeline.hpp"
#include "patchseg/synthetic.hpp"

namespace fs = std::filesystem;
using namespace patchseg;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "pipeline config file (TOML subset)");
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--workers", c.workers, "override the config worker count")->check(CLI::PositiveNumber);
}

PipelineConfig resolve(const Common& c) {
  PipelineConfig cfg = c.config_path.empty() ? PipelineConfig{} : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  cfg.validate();
  omp_set_num_threads(cfg.workers);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-based segmentation pipeline: folds, epoch plans, tiled inference, ensembles, metrics"};
  app.require_subcommand(1);

  Common common;
  std::string manifest;
  std::string out;
  int fold = 0;

  auto* split = app.add_subcommand("split", "write the leave-one-domain-out fold plan");
  split->add_option("--manifest", manifest)->required();
  split->add_option("--out", out)->required();

  std::optional<std::size_t> samples;
  auto* plan = app.add_subcommand("plan-epoch", "write one epoch's weighted patch draws as JSON lines");
  plan->add_option("--manifest", manifest)->required();
  plan->add_option("--fold", fold)->required();
  plan->add_option("--samples", samples, "override samples_per_epoch");
  plan->add_option("--out", out)->required();
  add_common(plan, common);

  std::string scorer_cmd;
  bool all_images = false;
  long timeout_ms = 30000;
  auto* infer = app.add_subcommand("infer", "tiled inference over a fold's validation images");
  infer->add_option("--manifest", manifest)->required();
  infer->add_option("--fold", fold);
  infer->add_flag("--all-images", all_images, "score every manifest image instead of one fold");
  infer->add_option("--scorer-cmd", scorer_cmd,
                    "external command, builtin:constant:<p> or builtin:oracle:<amplitude>[:<seed>]")
      ->required();
  infer->add_option("--timeout-ms", timeout_ms, "per-patch scorer timeout")->check(CLI::PositiveNumber);
  infer->add_option("--out", out)->required();
  add_common(infer, common);

  std::string method = "hard-vote";
  std::vector<std::string> inputs;
  auto* ensemble = app.add_subcommand("ensemble", "combine three fold models' outputs");
  ensemble->add_option("--method", method)->check(CLI::IsMember({"hard-vote", "prob-average"}));
  ensemble->add_option("--inputs", inputs, "model output directories")->required()->expected(1, -1);
  ensemble->add_option("--out", out)->required();
  add_common(ensemble, common);

  std::string pred_dir;
  std::string truth_dir;
  std::optional<int> eval_fold;
  bool pooled = false;
  std::vector<std::string> aggregate;
  auto* evaluate = app.add_subcommand("evaluate", "score predicted masks, or aggregate fold reports");
  evaluate->add_option("--pred", pred_dir);
  evaluate->add_option("--truth", truth_dir, "directory of <id>.png ground-truth masks");
  evaluate->add_option("--manifest", manifest, "take ground truth from a manifest instead");
  evaluate->add_option("--fold", eval_fold, "with --manifest: only that fold's validation ids");
  evaluate->add_flag("--pooled", pooled, "pool pixel counts over images instead of averaging");
  evaluate->add_option("--aggregate", aggregate, "fold report files to combine into mean +- std")
      ->expected(1, -1);
  evaluate->add_option("--out", out)->required();

  int domains = 3;
  int per_domain = 4;
  int size = 1500;
  std::uint64_t gen_seed = 0;
  auto* generate = app.add_subcommand("generate", "write a synthetic multi-domain dataset");
  generate->add_option("--domains", domains)->check(CLI::Range(1, 6));
  generate->add_option("--per-domain", per_domain)->check(CLI::PositiveNumber);
  generate->add_option("--size", size)->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed);
  generate->add_option("--out", out)->required();

  auto* fixture = app.add_subcommand("wire-fixture", "write PSRQ/PSRS conformance fixtures");
  fixture->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*split) {
      const FoldPlan p = cmd_split(manifest, out);
      std::cout << "wrote " << p.folds.size() << " folds to " << out << "\n";
    } else if (*plan) {
      PipelineConfig cfg = resolve(common);
      if (samples) cfg.samples_per_epoch = *samples;
      const auto n = cmd_plan_epoch(manifest, fold, cfg, out);
      std::cout << "wrote " << n << " draws to " << out << "\n";
    } else if (*infer) {
      InferArgs a;
      a.manifest_path = manifest;
      a.fold_id = fold;
      a.all_images = all_images;
      a.scorer_spec = scorer_cmd;
      a.timeout = std::chrono::milliseconds(timeout_ms);
      a.config = resolve(common);
      a.out_dir = out;
      const InferSummary s = cmd_infer(a);
      std::cout << s.succeeded.size() << " images inferred, " << s.failed.size() << " failed\n";
      for (const auto& [id, err] : s.failed) std::cerr << id << ": " << err << "\n";
      return s.ok() ? 0 : 1;
    } else if (*ensemble) {
      const PipelineConfig cfg = resolve(common);
      std::vector<fs::path> dirs(inputs.begin(), inputs.end());
      const auto ids = cmd_ensemble(parse_method(method), dirs, out, cfg.threshold);
      std::cout << "ensembled " << ids.size() << " images with " << method << "\n";
    } else if (*evaluate) {
      if (!aggregate.empty()) {
        const auto j = cmd_aggregate(std::vector<fs::path>(aggregate.begin(), aggregate.end()), out);
        std::cout << "dsc " << j["dsc"]["mean"].get<double>() << " +- " << j["dsc"]["std"].get<double>()
                  << " over " << j["folds"].get<std::size_t>() << " folds\n";
        return 0;
      }
      if (pred_dir.empty()) {
        std::cerr << "evaluate: --pred is required unless --aggregate is given\n";
        return 2;
      }
      EvaluateArgs a;
      a.pred_dir = pred_dir;
      if (!truth_dir.empty()) a.truth_dir = fs::path(truth_dir);
      if (!manifest.empty()) a.manifest = fs::path(manifest);
      a.fold_id = eval_fold;
      a.pooled = pooled;
      a.out_path = out;
      if (!a.truth_dir && !a.manifest) {
        std::cerr << "evaluate: give --truth or --manifest\n";
        return 2;
      }
      const MetricReport r = cmd_evaluate(a);
      std::cout << "dsc " << r.dsc << " jsc " << r.jsc << " score " << r.challenge_score << "\n";
    } else if (*generate) {
      SyntheticSpec spec = default_synthetic_spec(domains, per_domain, gen_seed);
      spec.height = size;
      spec.width = size;
      spec.max_radius = std::min(spec.max_radius, (size - 1) / 2.0 - 1.0);
      spec.min_radius = std::min(spec.min_radius, spec.max_radius);
      const auto m = generate_dataset(spec, out);
      std::cout << "wrote " << m.entries.size() << " images to " << out << "\n";
    } else if (*fixture) {
      cmd_wire_fixture(out);
      std::cout << "wrote request.bin and response.bin to " << out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
