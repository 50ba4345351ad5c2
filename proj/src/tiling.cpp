#include "patchseg/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "patchseg/errors.hpp"
#include "patchseg/kernels.hpp"

namespace patchseg {

namespace {

// Keeps far-tail weights representable as positive doubles for small sigma.
constexpr double kMinKernelWeight = 1e-200;

std::string origin_str(Origin o) {
  return "(" + std::to_string(o.row) + "," + std::to_string(o.col) + ")";
}

void check_window(int height, int width, Origin origin, int patch_size) {
  if (patch_size < 1 || origin.row < 0 || origin.col < 0 ||
      origin.row + patch_size > height || origin.col + patch_size > width) {
    throw Error(ErrorCode::OutOfBounds, "patch " + std::to_string(patch_size) + " at " +
                                            origin_str(origin) + " exceeds " +
                                            std::to_string(height) + "x" + std::to_string(width));
  }
}

// Origins matched to grid order; throws MissingPatch / ShapeMismatch.
std::vector<const ProbMap*> order_by_grid(std::span<const PatchProb> patch_probs,
                                          const PatchGrid& grid, const GaussianKernel& kernel,
                                          int out_height, int out_width) {
  if (out_height != grid.image_height || out_width != grid.image_width) {
    throw Error(ErrorCode::ShapeMismatch, "output size differs from grid image size");
  }
  if (kernel.size != grid.patch_size) {
    throw Error(ErrorCode::ShapeMismatch, "kernel size differs from patch size");
  }
  std::map<Origin, const ProbMap*> by_origin;
  for (const auto& pp : patch_probs) {
    if (pp.prob.width() != grid.patch_size || pp.prob.height() != grid.patch_size) {
      throw Error(ErrorCode::ShapeMismatch, "patch at " + origin_str(pp.origin) + " is " +
                                                std::to_string(pp.prob.height()) + "x" +
                                                std::to_string(pp.prob.width()));
    }
    if (!by_origin.emplace(pp.origin, &pp.prob).second) {
      throw Error(ErrorCode::ShapeMismatch, "duplicate patch at " + origin_str(pp.origin));
    }
  }
  std::vector<const ProbMap*> ordered;
  ordered.reserve(grid.size());
  for (const Origin o : grid.origins) {
    const auto it = by_origin.find(o);
    if (it == by_origin.end()) throw Error(ErrorCode::MissingPatch, "no patch for origin " + origin_str(o));
    ordered.push_back(it->second);
  }
  if (by_origin.size() != grid.size()) {
    throw Error(ErrorCode::ShapeMismatch, "patches supplied for origins not on the grid");
  }
  return ordered;
}

template <typename Blend>
ProbMap stitch_with(Blend blend, std::span<const PatchProb> patch_probs, const PatchGrid& grid,
                    const GaussianKernel& kernel, int out_height, int out_width) {
  const auto ordered = order_by_grid(patch_probs, grid, kernel, out_height, out_width);
  std::vector<const float*> pointers;
  pointers.reserve(ordered.size());
  for (const ProbMap* p : ordered) pointers.push_back(p->data().data());

  kernels::BlendInput in;
  in.origins = grid.origins;
  in.patches = pointers;
  in.kernel = kernel.weights;
  in.patch_size = grid.patch_size;
  in.out_height = out_height;
  in.out_width = out_width;

  std::vector<float> out(static_cast<std::size_t>(out_height) * out_width);
  blend(in, std::span<float>(out));
  return ProbMap(out_width, out_height, std::move(out));
}

}  // namespace

std::vector<int> axis_offsets(int extent, int patch_size, int stride) {
  std::vector<int> offsets;
  int last = 0;
  for (int o = 0; o + patch_size <= extent; o += stride) {
    offsets.push_back(o);
    last = o;
  }
  if (last + patch_size < extent) offsets.push_back(extent - patch_size);
  return offsets;
}

PatchGrid build_grid(int image_height, int image_width, int patch_size, int stride) {
  if (patch_size < 1) throw Error(ErrorCode::InvalidArgument, "patch_size must be >= 1");
  if (patch_size > std::min(image_height, image_width)) {
    throw Error(ErrorCode::PatchLargerThanImage,
                "patch " + std::to_string(patch_size) + " larger than image " +
                    std::to_string(image_height) + "x" + std::to_string(image_width));
  }
  if (stride < 1 || stride > patch_size) {
    throw Error(ErrorCode::InvalidArgument, "stride must be in [1, patch_size]");
  }
  PatchGrid grid;
  grid.image_height = image_height;
  grid.image_width = image_width;
  grid.patch_size = patch_size;
  grid.stride = stride;
  grid.row_offsets = axis_offsets(image_height, patch_size, stride);
  grid.col_offsets = axis_offsets(image_width, patch_size, stride);
  grid.origins.reserve(grid.row_offsets.size() * grid.col_offsets.size());
  for (const int r : grid.row_offsets) {
    for (const int c : grid.col_offsets) grid.origins.push_back({r, c});
  }
  return grid;
}

Raster extract_patch(const Raster& source, Origin origin, int patch_size) {
  check_window(source.height(), source.width(), origin, patch_size);
  const int ch = source.channels();
  std::vector<std::uint8_t> data(static_cast<std::size_t>(patch_size) * patch_size * ch);
  const auto src = source.data();
  const std::size_t row_len = static_cast<std::size_t>(patch_size) * ch;
  for (int r = 0; r < patch_size; ++r) {
    const std::size_t from =
        (static_cast<std::size_t>(origin.row + r) * source.width() + origin.col) * ch;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row_len,
                data.begin() + static_cast<std::ptrdiff_t>(r * row_len));
  }
  return Raster(patch_size, patch_size, ch, std::move(data));
}

BinaryMask extract_patch(const BinaryMask& source, Origin origin, int patch_size) {
  check_window(source.height(), source.width(), origin, patch_size);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(patch_size) * patch_size);
  const auto src = source.data();
  for (int r = 0; r < patch_size; ++r) {
    const std::size_t from = static_cast<std::size_t>(origin.row + r) * source.width() + origin.col;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), patch_size,
                data.begin() + static_cast<std::ptrdiff_t>(r) * patch_size);
  }
  return BinaryMask(patch_size, patch_size, std::move(data));
}

ProbMap extract_patch(const ProbMap& source, Origin origin, int patch_size) {
  check_window(source.height(), source.width(), origin, patch_size);
  std::vector<float> data(static_cast<std::size_t>(patch_size) * patch_size);
  const auto src = source.data();
  for (int r = 0; r < patch_size; ++r) {
    const std::size_t from = static_cast<std::size_t>(origin.row + r) * source.width() + origin.col;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), patch_size,
                data.begin() + static_cast<std::ptrdiff_t>(r) * patch_size);
  }
  return ProbMap(patch_size, patch_size, std::move(data));
}

GaussianKernel gaussian_kernel(int size, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidSigma, "sigma must be positive, got " + std::to_string(sigma));
  }
  if (size < 1) throw Error(ErrorCode::InvalidArgument, "kernel size must be >= 1");

  const double center = (size - 1) / 2.0;
  const double denom = 2.0 * sigma * sigma;
  // 1-D profile; the 2-D weight uses the summed squared distance so that
  // (i,j), (j,i) and mirrored indices produce the identical exponent.
  std::vector<double> sq(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    sq[i] = d * d;
  }
  // Subtracting the smallest exponent instead of dividing by exp() of it
  // keeps the peak at exactly 1.0 even when exp() would underflow.
  const double nearest = 2.0 * sq[size / 2];

  GaussianKernel k;
  k.size = size;
  k.sigma = sigma;
  k.weights.resize(static_cast<std::size_t>(size) * size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double w = std::exp(-(sq[i] + sq[j] - nearest) / denom);
      k.weights[static_cast<std::size_t>(i) * size + j] = std::max(w, kMinKernelWeight);
    }
  }
  return k;
}

StitchAccumulator::StitchAccumulator(int height, int width)
    : height_(height),
      width_(width),
      weighted_sum_(static_cast<std::size_t>(height) * width, 0.0),
      weight_sum_(static_cast<std::size_t>(height) * width, 0.0) {}

void StitchAccumulator::add(Origin origin, std::span<const float> patch,
                            const GaussianKernel& kernel) {
  const int ps = kernel.size;
  if (patch.size() != static_cast<std::size_t>(ps) * ps) {
    throw Error(ErrorCode::ShapeMismatch, "patch length differs from kernel size");
  }
  check_window(height_, width_, origin, ps);
  for (int r = 0; r < ps; ++r) {
    for (int c = 0; c < ps; ++c) {
      const std::size_t dst = static_cast<std::size_t>(origin.row + r) * width_ + origin.col + c;
      const std::size_t src = static_cast<std::size_t>(r) * ps + c;
      const double w = kernel.weights[src];
      weighted_sum_[dst] += w * static_cast<double>(patch[src]);
      weight_sum_[dst] += w;
    }
  }
}

ProbMap StitchAccumulator::finalize() const {
  std::vector<float> out(weighted_sum_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(weight_sum_[i] > 0.0)) {
      throw Error(ErrorCode::ShapeMismatch, "pixel " + std::to_string(i) + " received no weight");
    }
    out[i] = std::clamp(static_cast<float>(weighted_sum_[i] / weight_sum_[i]), 0.0f, 1.0f);
  }
  return ProbMap(width_, height_, std::move(out));
}

ProbMap stitch(std::span<const PatchProb> patch_probs, const PatchGrid& grid,
               const GaussianKernel& kernel, int out_height, int out_width) {
  return stitch_with([](const kernels::BlendInput& in, std::span<float> out) {
    kernels::blend_patches(in, out);
  }, patch_probs, grid, kernel, out_height, out_width);
}

ProbMap stitch_reference(std::span<const PatchProb> patch_probs, const PatchGrid& grid,
                         const GaussianKernel& kernel, int out_height, int out_width) {
  return stitch_with([](const kernels::BlendInput& in, std::span<float> out) {
    kernels::reference::blend_patches(in, out);
  }, patch_probs, grid, kernel, out_height, out_width);
}

BinaryMask threshold(const ProbMap& map, float cutoff) {
  std::vector<std::uint8_t> out(map.size());
  kernels::threshold(map.data(), cutoff, out);
  return BinaryMask(map.width(), map.height(), std::move(out));
}

}  // namespace patchseg
