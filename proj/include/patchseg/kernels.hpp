#pragma once

// Pixel-level kernels behind stitching, thresholding, ensembling and metrics.
// Each OpenMP kernel has a serial twin in `reference` that the tests compare
// against bit for bit and the benchmarks time against.

#include <cstdint>
#include <span>

#include "patchseg/raster.hpp"

namespace patchseg::kernels {

// Patches are laid out in grid order; patches[k] points to patch_size^2
// floats for origins[k]. kernel holds patch_size^2 blending weights.
struct BlendInput {
  std::span<const Origin> origins;
  std::span<const float* const> patches;
  std::span<const double> kernel;
  int patch_size = 0;
  int out_height = 0;
  int out_width = 0;
};

// out(p) = sum_k w_k(p) prob_k(p) / sum_k w_k(p), summed in patch order.
// Parallel over output rows; per-pixel summation order is the patch order,
// so the result does not depend on the thread count. Throws ShapeMismatch
// if some pixel is not covered by any patch.
void blend_patches(const BlendInput& in, std::span<float> out);

void threshold(std::span<const float> probs, float cutoff, std::span<std::uint8_t> out);

// out = 1 iff at least two of a, b, c are 1.
void hard_vote3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                std::span<const std::uint8_t> c, std::span<std::uint8_t> out);

// Per-pixel arithmetic mean, summed in input order.
void prob_average(std::span<const std::span<const float>> maps, std::span<float> out);

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

Confusion confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);

namespace reference {

void blend_patches(const BlendInput& in, std::span<float> out);
void threshold(std::span<const float> probs, float cutoff, std::span<std::uint8_t> out);
void hard_vote3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                std::span<const std::uint8_t> c, std::span<std::uint8_t> out);
void prob_average(std::span<const std::span<const float>> maps, std::span<float> out);
Confusion confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);

}  // namespace reference

}  // namespace patchseg::kernels
