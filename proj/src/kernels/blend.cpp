#include <algorithm>
#include <vector>

#include "patchseg/errors.hpp"
#include "patchseg/kernels.hpp"

namespace patchseg::kernels {

void blend_patches(const BlendInput& in, std::span<float> out) {
  const int ps = in.patch_size;
  const int height = in.out_height;
  const int width = in.out_width;
  const auto n_patches = static_cast<int>(in.origins.size());
  bool uncovered = false;

#pragma omp parallel
  {
    std::vector<double> value_row(static_cast<std::size_t>(width));
    std::vector<double> weight_row(static_cast<std::size_t>(width));

#pragma omp for schedule(static) reduction(|| : uncovered)
    for (int r = 0; r < height; ++r) {
      std::fill(value_row.begin(), value_row.end(), 0.0);
      std::fill(weight_row.begin(), weight_row.end(), 0.0);
      for (int k = 0; k < n_patches; ++k) {
        const Origin o = in.origins[k];
        const int pr = r - o.row;
        if (pr < 0 || pr >= ps) continue;
        const float* prob = in.patches[k] + static_cast<std::size_t>(pr) * ps;
        const double* w = in.kernel.data() + static_cast<std::size_t>(pr) * ps;
        double* vrow = value_row.data() + o.col;
        double* wrow = weight_row.data() + o.col;
        for (int c = 0; c < ps; ++c) {
          vrow[c] += w[c] * static_cast<double>(prob[c]);
          wrow[c] += w[c];
        }
      }
      float* dst = out.data() + static_cast<std::size_t>(r) * width;
      for (int c = 0; c < width; ++c) {
        if (!(weight_row[c] > 0.0)) {
          uncovered = true;
          dst[c] = 0.0f;
          continue;
        }
        dst[c] = std::clamp(static_cast<float>(value_row[c] / weight_row[c]), 0.0f, 1.0f);
      }
    }
  }
  if (uncovered) throw Error(ErrorCode::ShapeMismatch, "grid does not cover every output pixel");
}

}  // namespace patchseg::kernels
