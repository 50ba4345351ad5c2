#include <cmath>
#include <numbers>
#include <set>

#include "patchseg/fileio.hpp"
#include "patchseg/manifest.hpp"
#include "patchseg/synthetic.hpp"
#include "unit_test.hpp"

using namespace patchseg;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

// Independent inside test: distance in the ellipse frame.
bool inside(const TumorShape& s, int row, int col) {
  const double x = col - s.center_col;
  const double y = row - s.center_row;
  const double u = std::cos(-s.angle) * x - std::sin(-s.angle) * y;
  const double v = std::sin(-s.angle) * x + std::cos(-s.angle) * y;
  return std::pow(u / s.semi_axis_a, 2) + std::pow(v / s.semi_axis_b, 2) <= 1.0;
}

std::array<double, 3> channel_means(const Raster& img) {
  std::array<double, 3> m{};
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      for (int ch = 0; ch < 3; ++ch) m[ch] += img.at(r, c, ch);
  for (auto& v : m) v /= double(img.width()) * img.height();
  return m;
}

}  // namespace

TEST_CASE("disk area matches pi r^2 within 1%") {
  for (double radius : {60.0, 100.0, 150.5, 240.0}) {
    SyntheticSpec spec = default_synthetic_spec(1, 1, 0);
    spec.height = spec.width = 600;
    spec.shapes = {TumorShape::disk(299.5, 300.25, radius)};
    const SyntheticImage s = render_synthetic(spec, 0, 0);
    const double area = std::numbers::pi * radius * radius;
    CHECK(std::abs(double(s.mask.count()) - area) / area <= 0.01);
  }
}

TEST_CASE("masks are exact shape indicators") {
  SyntheticSpec spec = default_synthetic_spec(2, 2, 17);
  spec.height = 520;
  spec.width = 640;
  spec.max_radius = 200;
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < 2; ++i) {
      const SyntheticImage s = render_synthetic(spec, d, i);
      REQUIRE(!s.shapes.empty());
      CHECK(s.shapes.size() <= 3);
      bool exact = true;
      for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
          bool any = false;
          for (const auto& sh : s.shapes) any |= inside(sh, r, c);
          exact &= s.mask.at(r, c) == (any ? 1 : 0);
        }
      }
      CHECK(exact);
      for (const auto& sh : s.shapes) CHECK(sh.within(spec.height, spec.width));
    }
  }
}

TEST_CASE("domain textures are separated") {
  SyntheticSpec spec = default_synthetic_spec(3, 2, 5);
  spec.height = spec.width = 512;
  std::vector<std::array<double, 3>> means;
  for (int d = 0; d < 3; ++d) means.push_back(channel_means(render_synthetic(spec, d, 0).image));
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      double sep = 0;
      for (int ch = 0; ch < 3; ++ch) sep = std::max(sep, std::abs(means[a][ch] - means[b][ch]));
      CHECK(sep >= 10.0);
    }
  }
}

TEST_CASE("generate_dataset: counts, layout, determinism") {
  TempDir one, two;
  SyntheticSpec spec = default_synthetic_spec(3, 4, 99);
  spec.height = spec.width = 520;
  spec.max_radius = 120;
  const DatasetManifest m = generate_dataset(spec, one.path());
  CHECK(m.entries.size() == 12);
  std::set<std::string> domains;
  for (const auto& e : m.entries) {
    domains.insert(e.domain);
    CHECK(fs::exists(e.image_path));
    CHECK(fs::exists(e.mask_path));
    CHECK(e.image_id.rfind(e.domain + "_", 0) == 0);
  }
  CHECK(domains == std::set<std::string>{"domain_a", "domain_b", "domain_c"});
  const DatasetManifest loaded = load_manifest(one / "manifest.json");
  CHECK(loaded.entries.size() == 12);
  CHECK(load_mask(loaded.entries[0].mask_path).width() == 520);

  generate_dataset(spec, two.path());
  for (const auto& p : fs::recursive_directory_iterator(one.path())) {
    if (!p.is_regular_file()) continue;
    const auto rel = fs::relative(p.path(), one.path());
    CHECK(read_file_bytes(p.path()) == read_file_bytes(two / rel.string()));
  }
  spec.seed = 100;
  CHECK_FALSE(render_synthetic(spec, 0, 0).mask == load_mask(loaded.entries[0].mask_path));
}

TEST_CASE("spec validation") {
  SyntheticSpec spec = default_synthetic_spec(1, 1, 0);
  spec.height = spec.width = 200;
  CHECK_ERROR_CODE(spec.validate(), ErrorCode::InvalidArgument);  // radius 240 does not fit
  spec.shapes = {TumorShape::disk(10, 10, 50)};
  CHECK_ERROR_CODE(spec.validate(), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(default_synthetic_spec(0, 1, 0).validate(), ErrorCode::InvalidArgument);
  CHECK_NOTHROW(default_synthetic_spec(3, 4, 0).validate());
}
