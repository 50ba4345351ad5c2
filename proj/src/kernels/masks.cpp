#include <cstddef>

#include "patchseg/kernels.hpp"

namespace patchseg::kernels {

// Raw restrict pointers: uint8 outputs may alias anything, which otherwise
// keeps the outlined OpenMP bodies from vectorizing.

void threshold(std::span<const float> probs, float cutoff, std::span<std::uint8_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(probs.size());
  const float* __restrict p = probs.data();
  std::uint8_t* __restrict o = out.data();
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) o[i] = p[i] > cutoff ? 1 : 0;
}

void hard_vote3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                std::span<const std::uint8_t> c, std::span<std::uint8_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const std::uint8_t* __restrict pa = a.data();
  const std::uint8_t* __restrict pb = b.data();
  const std::uint8_t* __restrict pc = c.data();
  std::uint8_t* __restrict o = out.data();
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) o[i] = (pa[i] + pb[i] + pc[i]) >= 2 ? 1 : 0;
}

void prob_average(std::span<const std::span<const float>> maps, std::span<float> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const double count = static_cast<double>(maps.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& m : maps) sum += m[i];
    out[i] = static_cast<float>(sum / count);
  }
}

Confusion confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  const auto n = static_cast<std::ptrdiff_t>(pred.size());
  const std::uint8_t* __restrict p = pred.data();
  const std::uint8_t* __restrict t = truth.data();
  std::uint64_t tp = 0, fp = 0, fn = 0;
#pragma omp parallel for simd schedule(static) reduction(+ : tp, fp, fn)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::uint64_t pi = p[i] != 0;
    const std::uint64_t ti = t[i] != 0;
    tp += pi & ti;
    fp += pi & (ti ^ 1);
    fn += (pi ^ 1) & ti;
  }
  return {tp, fp, fn, static_cast<std::uint64_t>(n) - tp - fp - fn};
}

}  // namespace patchseg::kernels
