#include "patchseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>

#include "patchseg/ensemble.hpp"
#include "patchseg/errors.hpp"
#include "patchseg/fileio.hpp"
#include "patchseg/inference.hpp"
#include "patchseg/rng.hpp"
#include "patchseg/sampling.hpp"
#include "patchseg/tiling.hpp"
#include "patchseg/wire.hpp"

namespace patchseg {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad " + what + ": '" + s + "'");
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
}

nlohmann::ordered_json read_json(const fs::path& path) {
  try {
    return nlohmann::ordered_json::parse(read_file_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

}  // namespace

std::map<std::string, fs::path> list_by_id(const fs::path& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::FileNotFound, "not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != extension) continue;
    out.emplace(p.stem().string(), p);
  }
  return out;
}

FoldPlan cmd_split(const fs::path& manifest_path, const fs::path& out_path) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  FoldPlan plan = make_folds(manifest);
  write_file_atomic(out_path, fold_plan_to_json(plan).dump(2) + "\n");
  return plan;
}

std::size_t cmd_plan_epoch(const fs::path& manifest_path, int fold_id, const PipelineConfig& config,
                           const fs::path& out_path) {
  config.validate();
  const DatasetManifest manifest = load_manifest(manifest_path);
  const FoldPlan folds = make_folds(manifest);
  const Fold& fold = folds.fold(fold_id);

  std::vector<ManifestEntry> train;
  for (const auto& id : fold.train_ids) train.push_back(manifest.find(id));
  const WeightedPatchIndex index = build_index(std::span<const ManifestEntry>(train), config.patch_size,
                                               config.stride, config.weight_floor);
  const EpochPlan plan = build_epoch_plan(index, config.samples_per_epoch,
                                          mix_seed(config.seed, static_cast<std::uint64_t>(fold_id)));
  write_file_atomic(out_path, epoch_plan_to_jsonl(index, plan));
  return plan.draws.size();
}

ScorerFactory make_scorer_factory(const std::string& spec, const DatasetManifest& manifest,
                                  const std::vector<std::string>& image_ids, std::uint64_t seed,
                                  std::chrono::milliseconds timeout) {
  if (spec.rfind("builtin:", 0) == 0) {
    const auto parts = split(spec, ':');
    if (parts.size() >= 3 && parts[1] == "constant" && parts.size() == 3) {
      const auto p = static_cast<float>(parse_double(parts[2], "constant probability"));
      ConstantScorer probe(p);  // validates p up front
      return [p] { return std::make_unique<ConstantScorer>(p); };
    }
    if (parts.size() >= 3 && parts[1] == "oracle" && parts.size() <= 4) {
      const double amplitude = parse_double(parts[2], "oracle amplitude");
      const std::uint64_t oracle_seed =
          parts.size() == 4 ? static_cast<std::uint64_t>(parse_double(parts[3], "oracle seed")) : seed;
      auto truths = std::make_shared<std::map<std::string, BinaryMask>>();
      for (const auto& id : image_ids) truths->emplace(id, load_mask(manifest.find(id).mask_path));
      std::shared_ptr<const std::map<std::string, BinaryMask>> shared = truths;
      OracleScorer probe(truth_lookup_from(shared), amplitude, oracle_seed);
      return [shared, amplitude, oracle_seed] {
        return std::make_unique<OracleScorer>(truth_lookup_from(shared), amplitude, oracle_seed);
      };
    }
    throw Error(ErrorCode::InvalidArgument, "unknown builtin scorer '" + spec + "'");
  }
  ExternalScorerOptions options;
  options.command = spec;
  options.timeout = timeout;
  return [options] { return std::make_unique<ExternalScorer>(options); };
}

InferSummary cmd_infer(const InferArgs& args) {
  args.config.validate();
  const DatasetManifest manifest = load_manifest(args.manifest_path);
  std::vector<std::string> ids;
  if (args.all_images) {
    for (const auto& e : manifest.entries) ids.push_back(e.image_id);
    std::sort(ids.begin(), ids.end());
  } else {
    ids = make_folds(manifest).fold(args.fold_id).valid_ids;
  }
  ensure_dir(args.out_dir);

  const ScorerFactory factory =
      make_scorer_factory(args.scorer_spec, manifest, ids, args.config.seed, args.timeout);
  InferenceOptions options;
  options.patch_size = args.config.patch_size;
  options.stride = args.config.stride;
  options.sigma = args.config.kernel_sigma;

  std::vector<nlohmann::ordered_json> entries(ids.size());
  std::vector<std::optional<std::string>> errors(ids.size());
  std::atomic<std::size_t> next{0};
  const auto workers = static_cast<std::size_t>(std::max(1, args.config.workers));

  auto work = [&] {
    std::unique_ptr<PatchScorer> scorer;
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      const std::string& id = ids[i];
      nlohmann::ordered_json entry;
      entry["image_id"] = id;
      try {
        if (!scorer) scorer = factory();
        const Raster image = load_image(manifest.find(id).image_path);
        PatchScorer* const one[] = {scorer.get()};
        const InferenceResult result = run_inference(image, id, one, options);
        save_prob_map(result.probs, args.out_dir / (id + ".pmap"));
        save_mask(threshold(result.probs, args.config.threshold), args.out_dir / (id + ".png"));
        entry["status"] = "ok";
        entry["height"] = image.height();
        entry["width"] = image.width();
        entry["patches"] = result.grid.size();
        auto origins = nlohmann::ordered_json::array();
        for (const Origin o : result.grid.origins) origins.push_back({o.row, o.col});
        entry["origins"] = std::move(origins);
        entry["scoring_seconds"] = result.scoring_seconds;
        entry["stitching_seconds"] = result.stitching_seconds;
      } catch (const ScorerFailure& f) {
        entry["status"] = "failed";
        entry["error"] = f.what();
        entry["cause"] = std::string(to_string(f.cause()));
        entry["origin"] = {f.origin().row, f.origin().col};
        errors[i] = f.what();
        scorer.reset();
      } catch (const std::exception& e) {
        entry["status"] = "failed";
        entry["error"] = e.what();
        errors[i] = e.what();
        scorer.reset();
      }
      entries[i] = std::move(entry);
    }
  };
  {
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < std::min(workers, ids.size()); ++w) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
  }

  InferSummary summary;
  nlohmann::ordered_json log;
  log["manifest"] = args.manifest_path.generic_string();
  log["fold_id"] = args.all_images ? nlohmann::ordered_json() : nlohmann::ordered_json(args.fold_id);
  log["scorer"] = args.scorer_spec;
  log["grid"] = {{"patch_size", options.patch_size},
                 {"stride", options.stride},
                 {"sigma", options.sigma},
                 {"threshold", args.config.threshold}};
  log["images"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    log["images"].push_back(entries[i]);
    if (errors[i]) {
      summary.failed.emplace(ids[i], *errors[i]);
    } else {
      summary.succeeded.push_back(ids[i]);
    }
  }
  log["failures"] = summary.failed.size();
  write_file_atomic(args.out_dir / "infer_log.json", log.dump(2) + "\n");
  summary.log = std::move(log);
  return summary;
}

EnsembleMethod parse_method(const std::string& name) {
  if (name == "hard-vote" || name == "hard_vote") return EnsembleMethod::HardVote;
  if (name == "prob-average" || name == "prob_average") return EnsembleMethod::ProbAverage;
  throw Error(ErrorCode::InvalidArgument, "unknown ensemble method '" + name + "'");
}

std::string to_string(EnsembleMethod m) {
  return m == EnsembleMethod::HardVote ? "hard-vote" : "prob-average";
}

std::vector<std::string> cmd_ensemble(EnsembleMethod method, const std::vector<fs::path>& input_dirs,
                                      const fs::path& out_dir, float threshold_value) {
  if (input_dirs.empty()) throw Error(ErrorCode::EmptyInput, "no input directories");
  if (method == EnsembleMethod::HardVote && input_dirs.size() != 3) {
    throw Error(ErrorCode::WrongModelCount,
                "hard vote needs 3 directories, got " + std::to_string(input_dirs.size()));
  }
  const std::string ext = method == EnsembleMethod::HardVote ? ".png" : ".pmap";
  std::vector<std::map<std::string, fs::path>> listings;
  for (const auto& dir : input_dirs) listings.push_back(list_by_id(dir, ext));

  std::set<std::string> ids;
  for (const auto& [id, path] : listings[0]) ids.insert(id);
  for (std::size_t d = 0; d < listings.size(); ++d) {
    for (const auto& [id, path] : listings[d]) {
      if (!ids.count(id)) throw Error(ErrorCode::IdSetMismatch, id + " only in " + input_dirs[d].string());
    }
    for (const auto& id : ids) {
      if (!listings[d].count(id)) {
        throw Error(ErrorCode::IdSetMismatch, id + " missing from " + input_dirs[d].string());
      }
    }
  }
  if (ids.empty()) throw Error(ErrorCode::IdSetMismatch, "no " + ext + " files in the input directories");
  ensure_dir(out_dir);

  for (const auto& id : ids) {
    if (method == EnsembleMethod::HardVote) {
      std::vector<BinaryMask> masks;
      for (const auto& l : listings) masks.push_back(load_mask(l.at(id)));
      try {
        save_mask(hard_vote(masks), out_dir / (id + ".png"));
      } catch (const Error& e) {
        throw Error(e.code(), id + ": " + e.what());
      }
    } else {
      std::vector<ProbMap> maps;
      for (const auto& l : listings) maps.push_back(load_prob_map(l.at(id)));
      try {
        const ProbMap mean = prob_average(maps);
        save_prob_map(mean, out_dir / (id + ".pmap"));
        save_mask(threshold(mean, threshold_value), out_dir / (id + ".png"));
      } catch (const Error& e) {
        throw Error(e.code(), id + ": " + e.what());
      }
    }
  }

  nlohmann::ordered_json run;
  run["method"] = to_string(method);
  run["threshold"] = threshold_value;
  run["inputs"] = nlohmann::ordered_json::array();
  for (const auto& d : input_dirs) run["inputs"].push_back(d.generic_string());
  run["image_ids"] = std::vector<std::string>(ids.begin(), ids.end());
  write_file_atomic(out_dir / "ensemble_manifest.json", run.dump(2) + "\n");
  return {ids.begin(), ids.end()};
}

MetricReport cmd_evaluate(const EvaluateArgs& args) {
  std::map<std::string, fs::path> truth_paths;
  if (args.truth_dir) {
    truth_paths = list_by_id(*args.truth_dir, ".png");
  } else if (args.manifest) {
    const DatasetManifest manifest = load_manifest(*args.manifest);
    if (args.fold_id) {
      const FoldPlan plan = make_folds(manifest);
      for (const auto& id : plan.fold(*args.fold_id).valid_ids) {
        truth_paths.emplace(id, manifest.find(id).mask_path);
      }
    } else {
      for (const auto& e : manifest.entries) truth_paths.emplace(e.image_id, e.mask_path);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "evaluate needs a truth directory or a manifest");
  }
  const auto pred_paths = list_by_id(args.pred_dir, ".png");

  std::map<std::string, BinaryMask> preds;
  std::map<std::string, BinaryMask> truths;
  for (const auto& [id, p] : pred_paths) {
    if (!truth_paths.count(id)) throw Error(ErrorCode::IdSetMismatch, "prediction without truth: " + id);
  }
  for (const auto& [id, p] : truth_paths) {
    const auto it = pred_paths.find(id);
    if (it == pred_paths.end()) throw Error(ErrorCode::IdSetMismatch, "missing prediction: " + id);
    preds.emplace(id, load_mask(it->second));
    truths.emplace(id, load_mask(p));
  }
  const FoldEvaluation eval = evaluate_images(preds, truths);

  const MetricReport& chosen = args.pooled ? eval.pooled : eval.mean;
  nlohmann::ordered_json out;
  out["aggregation"] = args.pooled ? "pooled" : "per-image-mean";
  out["images"] = eval.per_image.size();
  out["report"] = report_to_json(chosen);
  out["mean"] = report_to_json(eval.mean);
  out["pooled"] = report_to_json(eval.pooled);
  auto per_image = nlohmann::ordered_json::object();
  for (const auto& m : eval.per_image) per_image[m.image_id] = report_to_json(m.report);
  out["per_image"] = std::move(per_image);
  write_file_atomic(args.out_path, out.dump(2) + "\n");
  return chosen;
}

nlohmann::ordered_json cmd_aggregate(const std::vector<fs::path>& report_paths,
                                     const fs::path& out_path) {
  if (report_paths.empty()) throw Error(ErrorCode::EmptyInput, "no fold reports to aggregate");
  std::vector<nlohmann::ordered_json> reports;
  for (const auto& p : report_paths) {
    auto j = read_json(p);
    reports.push_back(j.contains("report") ? j["report"] : j);
  }
  nlohmann::ordered_json out;
  out["folds"] = reports.size();
  out["sources"] = nlohmann::ordered_json::array();
  for (const auto& p : report_paths) out["sources"].push_back(p.generic_string());
  for (const char* key : {"dsc", "jsc", "challenge_score", "mean_class_dice"}) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (r.contains(key) && r[key].is_number()) values.push_back(r[key].get<double>());
    }
    if (values.size() != reports.size()) continue;
    const FoldSummary s = aggregate_folds(values);
    out[key] = {{"mean", s.mean}, {"std", s.stddev}, {"values", values}};
  }
  if (!out.contains("dsc")) throw Error(ErrorCode::InvalidArgument, "fold reports lack a dsc value");
  write_file_atomic(out_path, out.dump(2) + "\n");
  return out;
}

void cmd_wire_fixture(const fs::path& out_dir, int size) {
  ensure_dir(out_dir);
  wire::Request req;
  req.height = static_cast<std::uint32_t>(size);
  req.width = static_cast<std::uint32_t>(size);
  req.channels = 3;
  wire::Response resp;
  resp.height = req.height;
  resp.width = req.width;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const auto red = static_cast<std::uint8_t>((r * 37 + c * 11) % 256);
      req.payload.push_back(red);
      req.payload.push_back(static_cast<std::uint8_t>((r * 5 + c * 3) % 256));
      req.payload.push_back(static_cast<std::uint8_t>((r + c) % 256));
      resp.payload.push_back(static_cast<float>(red) / 255.0f);
    }
  }
  write_file_atomic(out_dir / "request.bin", wire::encode(req));
  write_file_atomic(out_dir / "response.bin", wire::encode(resp));
}

}  // namespace patchseg
