#include <omp.h>

#include "oracles.hpp"
#include "patchseg/kernels.hpp"
#include "patchseg/tiling.hpp"
#include "unit_test.hpp"

using namespace patchseg;
namespace k = patchseg::kernels;

namespace {

struct ThreadCount {
  explicit ThreadCount(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved); }
  int saved;
};

std::vector<std::uint8_t> bits(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (auto& x : v) x = rng() & 1;
  return v;
}

std::vector<float> floats(std::mt19937_64& rng, std::size_t n) {
  std::vector<float> v(n);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("blend_patches matches reference bit for bit at any thread count") {
  std::mt19937_64 rng(21);
  const PatchGrid grid = build_grid(333, 290, 96, 50);
  const GaussianKernel gk = gaussian_kernel(96, 12.0);
  std::vector<std::vector<float>> storage;
  std::vector<const float*> ptrs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    storage.push_back(floats(rng, 96 * 96));
    ptrs.push_back(storage.back().data());
  }
  const k::BlendInput in{grid.origins, ptrs, gk.weights, 96, 333, 290};
  std::vector<float> ref(333 * 290);
  k::reference::blend_patches(in, ref);
  for (int t : {1, 2, 4, 7}) {
    ThreadCount tc(t);
    std::vector<float> out(ref.size());
    k::blend_patches(in, out);
    CHECK(out == ref);
  }
}

TEST_CASE("blend_patches: uncovered pixel rejected") {
  const GaussianKernel gk = gaussian_kernel(4, 1.0);
  const std::vector<float> patch(16, 0.5f);
  const std::vector<Origin> origins{{0, 0}};
  const std::vector<const float*> ptrs{patch.data()};
  const k::BlendInput in{origins, ptrs, gk.weights, 4, 4, 5};
  std::vector<float> out(20);
  CHECK_ERROR_CODE(k::blend_patches(in, out), ErrorCode::ShapeMismatch);
  CHECK_ERROR_CODE(k::reference::blend_patches(in, out), ErrorCode::ShapeMismatch);
}

TEST_CASE("threshold, vote, average and confusion agree with reference") {
  std::mt19937_64 rng(22);
  const std::size_t n = 100003;
  const auto p = floats(rng, n);
  const auto a = bits(rng, n);
  const auto b = bits(rng, n);
  const auto c = bits(rng, n);
  const auto q = floats(rng, n);
  const auto r = floats(rng, n);
  const std::vector<std::span<const float>> maps{p, q, r};

  std::vector<std::uint8_t> t_ref(n), v_ref(n);
  std::vector<float> avg_ref(n);
  k::reference::threshold(p, 0.5f, t_ref);
  k::reference::hard_vote3(a, b, c, v_ref);
  k::reference::prob_average(maps, avg_ref);
  const auto conf_ref = k::reference::confusion(a, b);

  for (int t : {1, 3, 8}) {
    ThreadCount tc(t);
    std::vector<std::uint8_t> t_out(n), v_out(n);
    std::vector<float> avg_out(n);
    k::threshold(p, 0.5f, t_out);
    k::hard_vote3(a, b, c, v_out);
    k::prob_average(maps, avg_out);
    CHECK(t_out == t_ref);
    CHECK(v_out == v_ref);
    CHECK(avg_out == avg_ref);
    CHECK(k::confusion(a, b) == conf_ref);
  }

  // Independent checks of the reference itself.
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool vote_ok = true;
  bool thr_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    tp += a[i] && b[i];
    fp += a[i] && !b[i];
    fn += !a[i] && b[i];
    tn += !a[i] && !b[i];
    vote_ok &= v_ref[i] == oracles::majority(a[i], b[i], c[i]);
    thr_ok &= t_ref[i] == (p[i] > 0.5f);
  }
  CHECK(conf_ref == k::Confusion{tp, fp, fn, tn});
  CHECK(vote_ok);
  CHECK(thr_ok);
  CHECK(avg_ref[17] == doctest::Approx((p[17] + q[17] + r[17]) / 3.0).epsilon(1e-6));
}
