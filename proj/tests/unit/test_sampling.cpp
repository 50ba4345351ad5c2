#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "patchseg/manifest.hpp"
#include "patchseg/sampling.hpp"
#include "unit_test.hpp"

using namespace patchseg;
using testing::TempDir;

namespace {

WeightedPatchIndex index_with_weights(const std::vector<double>& w) {
  WeightedPatchIndex idx;
  for (std::size_t i = 0; i < w.size(); ++i)
    idx.entries.push_back({"img" + std::to_string(i), Origin{0, static_cast<int>(i)}, w[i], w[i]});
  return idx;
}

std::vector<double> frequencies(const EpochPlan& plan, std::size_t n) {
  std::vector<double> f(n, 0.0);
  for (auto d : plan.draws) f.at(d) += 1.0;
  for (auto& v : f) v /= static_cast<double>(plan.draws.size());
  return f;
}

}  // namespace

TEST_CASE("patch weights") {
  CHECK(compute_patch_weight(BinaryMask(512, 512, 1)) == 1.0);
  CHECK(tumor_fraction(BinaryMask(512, 512, 1)) == 1.0);
  CHECK(compute_patch_weight(BinaryMask(512, 512, 0)) == 0.05);
  BinaryMask half(512, 512);
  for (int r = 0; r < 256; ++r)
    for (int c = 0; c < 512; ++c) half.set(r, c, true);
  REQUIRE(half.count() == 131072);
  CHECK(compute_patch_weight(half) == 0.5);
  BinaryMask sliver(100, 100);
  sliver.set(0, 0, true);
  CHECK(compute_patch_weight(sliver) == 0.05);
  CHECK(compute_patch_weight(sliver, 0.0) == 1e-4);
}

TEST_CASE("build_index: one entry per image and grid origin") {
  std::mt19937_64 rng(1);
  std::vector<std::pair<std::string, BinaryMask>> masks;
  masks.emplace_back("a", testing::random_mask(rng, 1500, 1500, 0.2));
  masks.emplace_back("b", BinaryMask(1500, 1500));
  masks.emplace_back("c", testing::random_mask(rng, 1500, 1500, 0.9));
  const WeightedPatchIndex idx = build_index(masks);
  CHECK(idx.entries.size() == 75);
  std::set<std::pair<std::string, Origin>> seen;
  bool positive = true;
  for (const auto& e : idx.entries) {
    seen.insert({e.image_id, e.origin});
    positive &= e.weight > 0;
    if (e.image_id == "b") CHECK(e.weight == 0.05);
  }
  CHECK(seen.size() == 75);
  CHECK(positive);

  auto sorted = idx.entries;
  std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.tumor_fraction < y.tumor_fraction; });
  for (std::size_t i = 1; i < sorted.size(); ++i) CHECK(sorted[i].weight >= sorted[i - 1].weight);
}

TEST_CASE("build_index from manifest: dimension mismatch") {
  TempDir dir;
  save_image(Raster(1500, 1500, 3), dir / "img.png");
  save_mask(BinaryMask(1000, 1000), dir / "mask.png");
  const std::vector<ManifestEntry> entries{{"x", dir / "img.png", dir / "mask.png", "d"}};
  CHECK_ERROR_CODE(build_index(entries), ErrorCode::DimensionMismatch);

  save_mask(BinaryMask(1500, 1500, 1), dir / "mask.png");
  const WeightedPatchIndex idx = build_index(entries);
  CHECK(idx.entries.size() == 25);
  CHECK(idx.entries[0].weight == 1.0);
}

TEST_CASE("epoch plan: single entry, empty index") {
  const EpochPlan plan = build_epoch_plan(index_with_weights({0.3}), 17000, 5);
  CHECK(plan.draws.size() == 17000);
  CHECK(std::all_of(plan.draws.begin(), plan.draws.end(), [](auto d) { return d == 0; }));
  CHECK_ERROR_CODE(build_epoch_plan(WeightedPatchIndex{}, 10, 0), ErrorCode::EmptyIndex);
}

TEST_CASE("epoch plan: weights 1,2,4 frequencies and determinism") {
  const auto idx = index_with_weights({1, 2, 4});
  const EpochPlan plan = build_epoch_plan(idx, 100000, 42);
  const auto f = frequencies(plan, 3);
  CHECK(std::abs(f[0] - 1.0 / 7) <= 0.02);
  CHECK(std::abs(f[1] - 2.0 / 7) <= 0.02);
  CHECK(std::abs(f[2] - 4.0 / 7) <= 0.02);
  CHECK(build_epoch_plan(idx, 100000, 42).draws == plan.draws);
  CHECK(build_epoch_plan(idx, 100000, 43).draws != plan.draws);
}

TEST_CASE("epoch plan: random small indices within 3/sqrt(N)") {
  std::mt19937_64 rng(77);
  const std::size_t n_draws = 100000;
  const double tol = 3.0 / std::sqrt(static_cast<double>(n_draws));
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> w(n);
    for (auto& x : w) x = 0.05 + static_cast<double>(rng() % 1000) / 1000.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const auto f = frequencies(build_epoch_plan(index_with_weights(w), n_draws, rng()), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(f[i] - w[i] / total) <= tol);
  }
}

TEST_CASE("epoch plan JSONL") {
  const auto idx = index_with_weights({1, 1});
  const EpochPlan plan = build_epoch_plan(idx, 5, 1);
  const std::string text = epoch_plan_to_jsonl(idx, plan);
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("draw_index").get<int>() == n);
    const auto& e = idx.entries.at(plan.draws[n]);
    CHECK(j.at("image_id") == e.image_id);
    CHECK(j.at("origin_row").get<int>() == e.origin.row);
    CHECK(j.at("origin_col").get<int>() == e.origin.col);
    ++n;
  }
  CHECK(n == 5);
}
