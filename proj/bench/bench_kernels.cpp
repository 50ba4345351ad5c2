// OpenMP kernels against their serial references on 1500x1500 inputs
// (25 patches of 512 for blending). Thread count follows OMP_NUM_THREADS.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "patchseg/kernels.hpp"
#include "patchseg/tiling.hpp"

namespace {

using namespace patchseg;
namespace k = patchseg::kernels;

constexpr int kSide = 1500;
constexpr std::size_t kPixels = std::size_t{kSide} * kSide;

struct Inputs {
  PatchGrid grid = build_grid(kSide, kSide);
  GaussianKernel kernel = gaussian_kernel(kDefaultPatchSize, kDefaultSigma);
  std::vector<std::vector<float>> patches;
  std::vector<const float*> patch_ptrs;
  std::vector<float> p0, p1, p2;
  std::vector<std::uint8_t> m0, m1, m2;

  Inputs() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      patches.emplace_back(std::size_t{kDefaultPatchSize} * kDefaultPatchSize);
      for (float& v : patches.back()) v = u(rng);
      patch_ptrs.push_back(patches.back().data());
    }
    for (auto* v : {&p0, &p1, &p2}) {
      v->resize(kPixels);
      for (float& x : *v) x = u(rng);
    }
    for (auto* v : {&m0, &m1, &m2}) {
      v->resize(kPixels);
      for (auto& x : *v) x = rng() & 1;
    }
  }

  k::BlendInput blend() const {
    return {grid.origins, patch_ptrs, kernel.weights, kDefaultPatchSize, kSide, kSide};
  }
};

const Inputs& inputs() {
  static const Inputs in;
  return in;
}

template <auto Fn>
void BM_blend(benchmark::State& state) {
  const auto& in = inputs();
  std::vector<float> out(kPixels);
  for (auto _ : state) {
    Fn(in.blend(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kPixels));
}

template <auto Fn>
void BM_threshold(benchmark::State& state) {
  const auto& in = inputs();
  std::vector<std::uint8_t> out(kPixels);
  for (auto _ : state) {
    Fn(in.p0, 0.5f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kPixels));
}

template <auto Fn>
void BM_hard_vote(benchmark::State& state) {
  const auto& in = inputs();
  std::vector<std::uint8_t> out(kPixels);
  for (auto _ : state) {
    Fn(in.m0, in.m1, in.m2, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kPixels));
}

template <auto Fn>
void BM_prob_average(benchmark::State& state) {
  const auto& in = inputs();
  const std::vector<std::span<const float>> maps{in.p0, in.p1, in.p2};
  std::vector<float> out(kPixels);
  for (auto _ : state) {
    Fn(maps, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kPixels));
}

template <auto Fn>
void BM_confusion(benchmark::State& state) {
  const auto& in = inputs();
  for (auto _ : state) benchmark::DoNotOptimize(Fn(in.m0, in.m1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kPixels));
}

}  // namespace

BENCHMARK(BM_blend<k::blend_patches>)->Name("blend/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_blend<k::reference::blend_patches>)->Name("blend/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_threshold<k::threshold>)->Name("threshold/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_threshold<k::reference::threshold>)->Name("threshold/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_hard_vote<k::hard_vote3>)->Name("hard_vote/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_hard_vote<k::reference::hard_vote3>)->Name("hard_vote/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_prob_average<k::prob_average>)->Name("prob_average/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_prob_average<k::reference::prob_average>)->Name("prob_average/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_confusion<k::confusion>)->Name("confusion/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_confusion<k::reference::confusion>)->Name("confusion/serial")->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
