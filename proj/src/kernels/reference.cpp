// Straight-line serial versions of the OpenMP kernels.

#include <algorithm>
#include <vector>

#include "patchseg/errors.hpp"
#include "patchseg/kernels.hpp"
#include "patchseg/tiling.hpp"

namespace patchseg::kernels::reference {

void blend_patches(const BlendInput& in, std::span<float> out) {
  const int ps = in.patch_size;
  GaussianKernel kernel;
  kernel.size = ps;
  kernel.weights.assign(in.kernel.begin(), in.kernel.end());

  StitchAccumulator acc(in.out_height, in.out_width);
  const std::size_t patch_len = static_cast<std::size_t>(ps) * ps;
  for (std::size_t k = 0; k < in.origins.size(); ++k) {
    acc.add(in.origins[k], std::span<const float>(in.patches[k], patch_len), kernel);
  }
  const ProbMap result = acc.finalize();
  std::copy(result.data().begin(), result.data().end(), out.begin());
}

void threshold(std::span<const float> probs, float cutoff, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > cutoff ? 1 : 0;
}

void hard_vote3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                std::span<const std::uint8_t> c, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int votes = a[i] + b[i] + c[i];
    out[i] = votes >= 2 ? 1 : 0;
  }
}

void prob_average(std::span<const std::span<const float>> maps, std::span<float> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = 0.0;
    for (const auto& m : maps) sum += m[i];
    out[i] = static_cast<float>(sum / static_cast<double>(maps.size()));
  }
}

Confusion confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

}  // namespace patchseg::kernels::reference
