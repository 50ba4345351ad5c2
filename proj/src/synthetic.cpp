#include "patchseg/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "patchseg/errors.hpp"
#include "patchseg/rng.hpp"

namespace patchseg {

namespace fs = std::filesystem;

namespace {

// Base tissue colors per domain slot; channel means differ by >= 30 levels
// between any two slots.
constexpr std::array<std::array<int, 3>, 6> kPalette = {{
    {228, 176, 204},
    {176, 132, 214},
    {214, 206, 146},
    {146, 196, 172},
    {240, 220, 230},
    {120, 150, 200},
}};
constexpr std::array<int, 3> kTumorColor = {110, 40, 120};

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

std::string image_id_for(const std::string& domain, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", index);
  return domain + "_" + buf;
}

std::vector<TumorShape> draw_shapes(const SyntheticSpec& spec, Rng& rng) {
  std::vector<TumorShape> shapes;
  const int n = rng.uniform_int(spec.min_shapes, spec.max_shapes);
  for (int i = 0; i < n; ++i) {
    TumorShape s;
    s.semi_axis_a = rng.uniform(spec.min_radius, spec.max_radius);
    s.semi_axis_b = spec.disks_only ? s.semi_axis_a : s.semi_axis_a * rng.uniform(0.5, 1.0);
    s.angle = spec.disks_only ? 0.0 : rng.uniform(0.0, std::numbers::pi);
    const double reach = std::max(s.semi_axis_a, s.semi_axis_b);
    s.center_row = rng.uniform(reach, spec.height - 1 - reach);
    s.center_col = rng.uniform(reach, spec.width - 1 - reach);
    shapes.push_back(s);
  }
  return shapes;
}

}  // namespace

bool TumorShape::contains(int row, int col) const {
  const double dx = col - center_col;
  const double dy = row - center_row;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double u = dx * c + dy * s;
  const double v = -dx * s + dy * c;
  return (u * u) / (semi_axis_a * semi_axis_a) + (v * v) / (semi_axis_b * semi_axis_b) <= 1.0;
}

bool TumorShape::within(int height, int width) const {
  const double reach = std::max(semi_axis_a, semi_axis_b);
  return center_row - reach >= 0.0 && center_col - reach >= 0.0 &&
         center_row + reach <= height - 1 && center_col + reach <= width - 1;
}

void SyntheticSpec::validate() const {
  if (domains.empty()) throw Error(ErrorCode::InvalidArgument, "synthetic spec has no domains");
  if (domains.size() > kPalette.size()) {
    throw Error(ErrorCode::InvalidArgument, "at most " + std::to_string(kPalette.size()) + " domains");
  }
  for (const auto& d : domains) {
    if (d.name.empty() || d.count < 1) {
      throw Error(ErrorCode::InvalidArgument, "domain needs a name and count >= 1");
    }
  }
  if (height < 1 || width < 1) throw Error(ErrorCode::InvalidArgument, "bad image size");
  for (const auto& s : shapes) {
    if (!(s.semi_axis_a > 0 && s.semi_axis_b > 0) || !s.within(height, width)) {
      throw Error(ErrorCode::InvalidArgument, "tumor shape outside image bounds");
    }
  }
  if (shapes.empty()) {
    if (min_shapes < 0 || min_shapes > max_shapes) throw Error(ErrorCode::InvalidArgument, "bad shape count range");
    if (!(min_radius > 0 && min_radius <= max_radius) ||
        2 * max_radius + 1 > std::min(height, width)) {
      throw Error(ErrorCode::InvalidArgument, "bad radius range for image size");
    }
  }
}

SyntheticImage render_synthetic(const SyntheticSpec& spec, int domain_index, int image_index) {
  const SyntheticDomain& domain = spec.domains.at(static_cast<std::size_t>(domain_index));
  SyntheticImage out;
  out.domain = domain.name;
  out.image_id = image_id_for(domain.name, image_index);

  std::uint64_t s = mix_seed(spec.seed, hash_string(domain.name));
  s = mix_seed(s, static_cast<std::uint64_t>(image_index));
  Rng rng(s);
  out.shapes = spec.shapes.empty() ? draw_shapes(spec, rng) : spec.shapes;

  // Domain texture: stripes whose frequency and phase come from the texture
  // seed, plus per-pixel noise.
  Rng texture(mix_seed(domain.texture_seed, static_cast<std::uint64_t>(image_index)));
  const double freq_r = 0.01 + 0.04 * Rng(domain.texture_seed).uniform01();
  const double freq_c = 0.01 + 0.04 * Rng(domain.texture_seed + 1).uniform01();
  const double phase = texture.uniform(0.0, 2.0 * std::numbers::pi);
  const auto& base = kPalette[static_cast<std::size_t>(domain_index)];

  out.image = Raster(spec.width, spec.height, 3);
  out.mask = BinaryMask(spec.width, spec.height);
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      bool tumor = false;
      for (const auto& shape : out.shapes) {
        if (shape.contains(r, c)) {
          tumor = true;
          break;
        }
      }
      out.mask.set(r, c, tumor);
      const double stripe = 10.0 * std::sin(freq_r * r + freq_c * c + phase);
      const double noise = texture.uniform(-8.0, 8.0);
      for (int ch = 0; ch < 3; ++ch) {
        const double level = tumor ? kTumorColor[ch] : base[ch];
        out.image.at(r, c, ch) = clamp_u8(level + stripe + noise);
      }
    }
  }
  return out;
}

DatasetManifest generate_dataset(const SyntheticSpec& spec, const fs::path& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  fs::create_directories(out_dir / "masks", ec);
  if (!fs::is_directory(out_dir / "images") || !fs::is_directory(out_dir / "masks")) {
    throw Error(ErrorCode::IoError, "cannot create dataset directories under " + out_dir.string());
  }

  std::vector<std::pair<int, int>> jobs;
  for (int d = 0; d < static_cast<int>(spec.domains.size()); ++d) {
    for (int i = 0; i < spec.domains[d].count; ++i) jobs.emplace_back(d, i);
  }

  DatasetManifest relative;
  relative.task_id = spec.task_id;
  relative.entries.resize(jobs.size());
  std::vector<std::string> errors(jobs.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    try {
      const SyntheticImage img = render_synthetic(spec, jobs[j].first, jobs[j].second);
      const fs::path image_rel = fs::path("images") / (img.image_id + ".png");
      const fs::path mask_rel = fs::path("masks") / (img.image_id + ".png");
      save_image(img.image, out_dir / image_rel);
      save_mask(img.mask, out_dir / mask_rel);
      relative.entries[j] = {img.image_id, image_rel, mask_rel, img.domain};
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorCode::IoError, e);
  }
  save_manifest(relative, out_dir / "manifest.json");

  DatasetManifest resolved = relative;
  for (auto& e : resolved.entries) {
    e.image_path = out_dir / e.image_path;
    e.mask_path = out_dir / e.mask_path;
  }
  return resolved;
}

SyntheticSpec default_synthetic_spec(int domains, int per_domain, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  for (int d = 0; d < domains; ++d) {
    SyntheticDomain dom;
    dom.name = std::string("domain_") + static_cast<char>('a' + d);
    dom.texture_seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(d));
    dom.count = per_domain;
    spec.domains.push_back(std::move(dom));
  }
  return spec;
}

}  // namespace patchseg
