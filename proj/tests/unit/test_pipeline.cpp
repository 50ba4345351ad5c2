#include <set>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "patchseg/fileio.hpp"
#include "patchseg/manifest.hpp"
#include "patchseg/pipeline.hpp"
#include "patchseg/synthetic.hpp"
#include "patchseg/wire.hpp"
#include "unit_test.hpp"

using namespace patchseg;
using testing::TempDir;
using nlohmann::json;

namespace {

DatasetManifest small_dataset(const fs::path& dir, int domains = 3, int per_domain = 2) {
  SyntheticSpec spec = default_synthetic_spec(domains, per_domain, 21);
  spec.height = 560;
  spec.width = 600;
  spec.max_radius = 150;
  return generate_dataset(spec, dir);
}

int run_cli(const std::string& args) {
  const std::string cmd = testing::cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

InferArgs infer_args(const fs::path& manifest, const std::string& scorer, const fs::path& out) {
  InferArgs a;
  a.manifest_path = manifest;
  a.scorer_spec = scorer;
  a.out_dir = out;
  a.timeout = std::chrono::milliseconds(5000);
  return a;
}

}  // namespace

TEST_CASE("split: three folds, byte-identical rerun, single domain fails") {
  TempDir dir;
  small_dataset(dir / "data");
  const FoldPlan plan = cmd_split(dir / "data" / "manifest.json", dir / "folds.json");
  CHECK(plan.folds.size() == 3);
  const auto first = read_file_bytes(dir / "folds.json");
  cmd_split(dir / "data" / "manifest.json", dir / "folds.json");
  CHECK(read_file_bytes(dir / "folds.json") == first);
  const json j = json::parse(read_file_text(dir / "folds.json"));
  CHECK(j.at("folds").size() == 3);

  small_dataset(dir / "mono", 1, 2);
  CHECK_ERROR_CODE(cmd_split(dir / "mono" / "manifest.json", dir / "x.json"), ErrorCode::SingleDomain);
  CHECK(run_cli("split --manifest " + (dir / "mono" / "manifest.json").string() + " --out " + (dir / "x.json").string()) == 1);
  CHECK(run_cli("split --manifest " + (dir / "data" / "manifest.json").string() + " --out " + (dir / "y.json").string()) == 0);
  CHECK(read_file_bytes(dir / "y.json") == first);
}

TEST_CASE("plan-epoch: default count, determinism, config plumbing") {
  TempDir dir;
  small_dataset(dir / "data");
  const auto manifest = dir / "data" / "manifest.json";
  PipelineConfig cfg;
  CHECK(cmd_plan_epoch(manifest, 0, cfg, dir / "a.jsonl") == 17000);
  CHECK(count_lines(read_file_text(dir / "a.jsonl")) == 17000);
  cmd_plan_epoch(manifest, 0, cfg, dir / "b.jsonl");
  CHECK(read_file_bytes(dir / "a.jsonl") == read_file_bytes(dir / "b.jsonl"));

  // training ids only
  const FoldPlan plan = make_folds(load_manifest(manifest));
  const std::set<std::string> train(plan.fold(0).train_ids.begin(), plan.fold(0).train_ids.end());
  std::istringstream in(read_file_text(dir / "a.jsonl"));
  std::string line;
  bool only_train = true;
  while (std::getline(in, line)) only_train &= train.count(json::parse(line).at("image_id")) == 1;
  CHECK(only_train);

  cfg.samples_per_epoch = 10;
  cmd_plan_epoch(manifest, 1, cfg, dir / "c.jsonl");
  CHECK(count_lines(read_file_text(dir / "c.jsonl")) == 10);

  write_file_atomic(dir / "cfg.toml", std::string_view("samples_per_epoch = 10\nseed = 3\n"));
  CHECK(run_cli("plan-epoch --manifest " + manifest.string() + " --fold 2 --config " + (dir / "cfg.toml").string() +
                " --out " + (dir / "d.jsonl").string()) == 0);
  CHECK(count_lines(read_file_text(dir / "d.jsonl")) == 10);
  CHECK(run_cli("plan-epoch --manifest " + manifest.string() + " --fold 9 --out " + (dir / "e.jsonl").string()) == 1);
}

TEST_CASE("infer: constant scorer writes uniform maps") {
  TempDir dir;
  small_dataset(dir / "data");
  const InferSummary s = cmd_infer(infer_args(dir / "data" / "manifest.json", "builtin:constant:0.3", dir / "out"));
  REQUIRE(s.ok());
  CHECK(s.succeeded.size() == 2);
  for (const auto& id : s.succeeded) {
    const ProbMap p = load_prob_map(dir / "out" / (id + ".pmap"));
    CHECK(p.width() == 600);
    double worst = 0;
    for (float v : p.data()) worst = std::max(worst, std::abs(double(v) - 0.3));
    CHECK(worst <= 1e-6);
    CHECK(load_mask(dir / "out" / (id + ".png")).count() == 0);
  }
  const json log = json::parse(read_file_text(dir / "out" / "infer_log.json"));
  CHECK(log.at("grid").at("patch_size") == 512);
  CHECK(log.at("images").at(0).at("patches") == 2 * 2);
}

TEST_CASE("infer + evaluate: oracle reproduces the truth") {
  TempDir dir;
  const DatasetManifest m = small_dataset(dir / "data");
  const auto manifest = dir / "data" / "manifest.json";
  auto args = infer_args(manifest, "builtin:oracle:0.3", dir / "out");
  args.all_images = true;
  args.config.workers = 2;
  const InferSummary s = cmd_infer(args);
  REQUIRE(s.ok());
  CHECK(s.succeeded.size() == 6);
  for (const auto& e : m.entries) CHECK(load_mask(dir / "out" / (e.image_id + ".png")) == load_mask(e.mask_path));

  EvaluateArgs ev;
  ev.pred_dir = dir / "out";
  ev.manifest = manifest;
  ev.out_path = dir / "report.json";
  const MetricReport r = cmd_evaluate(ev);
  CHECK(r.challenge_score == 1.0);
  CHECK(r.dsc == 1.0);
  CHECK(r.mean_class_dice == 1.0);

  ev.truth_dir = dir / "data" / "masks";
  ev.manifest.reset();
  ev.pooled = true;
  CHECK(cmd_evaluate(ev).jsc == 1.0);
  const json j = json::parse(read_file_text(dir / "report.json"));
  CHECK(j.at("aggregation") == "pooled");
  CHECK(j.at("per_image").size() == 6);
}

TEST_CASE("infer: dead scorer gives per-image failures and exit 1") {
  TempDir dir;
  small_dataset(dir / "data");
  const auto manifest = dir / "data" / "manifest.json";
  const InferSummary s = cmd_infer(infer_args(manifest, testing::mock_peer_path() + " crash-after 0", dir / "out"));
  CHECK_FALSE(s.ok());
  CHECK(s.failed.size() == 2);
  const json log = json::parse(read_file_text(dir / "out" / "infer_log.json"));
  for (const auto& img : log.at("images")) {
    CHECK(img.at("status") == "failed");
    CHECK(img.at("cause") == "ScorerCrashed");
    CHECK(img.at("origin") == json::array({0, 0}));
  }
  CHECK(run_cli("infer --manifest " + manifest.string() + " --fold 0 --scorer-cmd 'exit 3' --out " +
                (dir / "cli").string()) == 1);
  CHECK(run_cli("infer --manifest " + manifest.string() + " --fold 0 --scorer-cmd '" + testing::mock_peer_path() +
                " uniform 0.9' --out " + (dir / "cli").string()) == 0);
  CHECK(fs::exists(dir / "cli" / "infer_log.json"));
}

TEST_CASE("ensemble: idempotent vote, averaging, id mismatch") {
  TempDir dir;
  std::mt19937_64 rng(3);
  const BinaryMask m1 = testing::random_mask(rng, 20, 10, 0.5);
  const BinaryMask m2 = testing::random_mask(rng, 20, 10, 0.5);
  for (const char* d : {"a", "b", "c"}) {
    fs::create_directories(dir / d);
    save_mask(m1, dir / d / "x.png");
    save_mask(m2, dir / d / "y.png");
  }
  const auto ids = cmd_ensemble(EnsembleMethod::HardVote, {dir / "a", dir / "b", dir / "c"}, dir / "vote");
  CHECK(ids == std::vector<std::string>{"x", "y"});
  CHECK(load_mask(dir / "vote" / "x.png") == m1);
  CHECK(load_mask(dir / "vote" / "y.png") == m2);
  CHECK(fs::exists(dir / "vote" / "ensemble_manifest.json"));
  CHECK_ERROR_CODE(cmd_ensemble(EnsembleMethod::HardVote, {dir / "a", dir / "b"}, dir / "v2"), ErrorCode::WrongModelCount);

  const float vals[] = {0.6f, 0.4f, 0.55f};
  for (int i = 0; i < 3; ++i) {
    fs::create_directories(dir / ("p" + std::to_string(i)));
    save_prob_map(ProbMap(6, 4, vals[i]), dir / ("p" + std::to_string(i)) / "x.pmap");
  }
  cmd_ensemble(EnsembleMethod::ProbAverage, {dir / "p0", dir / "p1", dir / "p2"}, dir / "avg");
  CHECK(load_mask(dir / "avg" / "x.png").count() == 24);
  CHECK(load_prob_map(dir / "avg" / "x.pmap").at(2, 3) == doctest::Approx(0.516667).epsilon(1e-5));

  fs::remove(dir / "c" / "y.png");
  CHECK_ERROR_CODE(cmd_ensemble(EnsembleMethod::HardVote, {dir / "a", dir / "b", dir / "c"}, dir / "v3"), ErrorCode::IdSetMismatch);
  CHECK(parse_method("hard-vote") == EnsembleMethod::HardVote);
  CHECK(parse_method("prob-average") == EnsembleMethod::ProbAverage);
  CHECK_ERROR_CODE(parse_method("median"), ErrorCode::InvalidArgument);
}

TEST_CASE("evaluate: empty directories, aggregation of fold reports") {
  TempDir dir;
  fs::create_directories(dir / "pred");
  fs::create_directories(dir / "truth");
  EvaluateArgs ev;
  ev.pred_dir = dir / "pred";
  ev.truth_dir = dir / "truth";
  ev.out_path = dir / "r.json";
  CHECK_ERROR_CODE(cmd_evaluate(ev), ErrorCode::IdSetMismatch);

  std::vector<fs::path> reports;
  for (double d : {0.8200, 0.8266, 0.9137}) {
    reports.push_back(dir / ("f" + std::to_string(reports.size()) + ".json"));
    json j = {{"report", {{"dsc", d}, {"jsc", d / (2 - d)}}}};
    write_file_atomic(reports.back(), j.dump());
  }
  const auto agg = cmd_aggregate(reports, dir / "agg.json");
  CHECK(std::abs(agg.at("dsc").at("mean").get<double>() - 0.8534) <= 5e-5);
  CHECK(agg.at("dsc").at("values").size() == 3);
  CHECK(run_cli("evaluate --aggregate " + reports[0].string() + " " + reports[1].string() + " " + reports[2].string() +
                " --out " + (dir / "agg2.json").string()) == 0);
}

TEST_CASE("wire fixtures") {
  TempDir dir;
  cmd_wire_fixture(dir.path());
  const wire::Request q = wire::decode_request(read_file_bytes(dir / "request.bin"));
  const wire::Response s = wire::decode_response(read_file_bytes(dir / "response.bin"));
  CHECK(q.height == 8);
  CHECK(q.channels == 3);
  REQUIRE(s.payload.size() == 64);
  for (std::size_t i = 0; i < 64; ++i) CHECK(s.payload[i] == q.payload[i * 3] / 255.0f);
  TempDir again;
  cmd_wire_fixture(again.path());
  CHECK(read_file_bytes(again / "request.bin") == read_file_bytes(dir / "request.bin"));
}

TEST_CASE("cli usage errors exit 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("split") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("--help") == 0);
}
