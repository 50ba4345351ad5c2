#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "patchseg/manifest.hpp"
#include "patchseg/raster.hpp"

namespace patchseg {

/// Ellipse in pixel coordinates (col = x, row = y); a disk when a == b.
/// Pixel (row, col) is inside iff u^2/a^2 + v^2/b^2 <= 1 where (u, v) is
/// (col - center_col, row - center_row) rotated by -angle.
struct TumorShape {
  double center_row = 0.0;
  double center_col = 0.0;
  double semi_axis_a = 0.0;
  double semi_axis_b = 0.0;
  double angle = 0.0;  // radians

  static TumorShape disk(double row, double col, double radius) {
    return {row, col, radius, radius, 0.0};
  }
  bool contains(int row, int col) const;
  bool within(int height, int width) const;
};

struct SyntheticDomain {
  std::string name;
  std::uint64_t texture_seed = 0;
  int count = 1;
};

struct SyntheticSpec {
  std::string task_id = "synthetic";
  std::vector<SyntheticDomain> domains;
  int height = 1500;
  int width = 1500;
  // Applied to every image when non-empty; otherwise shapes are drawn per image.
  std::vector<TumorShape> shapes;
  int min_shapes = 1;
  int max_shapes = 3;
  double min_radius = 60.0;
  double max_radius = 240.0;
  bool disks_only = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticImage {
  std::string image_id;
  std::string domain;
  Raster image;
  BinaryMask mask;
  std::vector<TumorShape> shapes;
};

// Deterministic in (spec, domain_index, image_index).
SyntheticImage render_synthetic(const SyntheticSpec& spec, int domain_index, int image_index);

// Writes images/<id>.png, masks/<id>.png ({0,255}) and manifest.json under
// out_dir; returns the manifest with paths resolved against out_dir.
DatasetManifest generate_dataset(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

// n domains named domain_a, domain_b, ... with `per_domain` images each.
SyntheticSpec default_synthetic_spec(int domains, int per_domain, std::uint64_t seed);

}  // namespace patchseg
