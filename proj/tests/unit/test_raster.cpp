#include <cstring>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "patchseg/fileio.hpp"
#include "patchseg/raster.hpp"
#include "unit_test.hpp"

using namespace patchseg;
using testing::TempDir;

namespace {

void write_png(const cv::Mat& m, const std::filesystem::path& p) {
  REQUIRE(cv::imwrite(p.string(), m));
}

std::uint32_t le_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return std::uint32_t{b[at]} | std::uint32_t{b[at + 1]} << 8 | std::uint32_t{b[at + 2]} << 16 |
         std::uint32_t{b[at + 3]} << 24;
}

}  // namespace

TEST_CASE("load_image: rgb png keeps size and channel order") {
  TempDir dir;
  std::mt19937_64 rng(1);
  const Raster img = testing::random_raster(rng, 1500, 1500);
  save_image(img, dir / "a.png");
  const Raster back = load_image(dir / "a.png");
  CHECK(back.width() == 1500);
  CHECK(back.height() == 1500);
  CHECK(back.channels() == 3);
  CHECK(back == img);

  // OpenCV stores BGR; a pure red pixel must come back as channel 0.
  cv::Mat bgr(2, 2, CV_8UC3, cv::Scalar(0, 0, 255));
  write_png(bgr, dir / "red.png");
  const Raster red = load_image(dir / "red.png");
  CHECK(red.at(1, 1, 0) == 255);
  CHECK(red.at(1, 1, 1) == 0);
  CHECK(red.at(1, 1, 2) == 0);
}

TEST_CASE("load_image: grayscale replicated to three equal channels") {
  TempDir dir;
  cv::Mat gray(512, 512, CV_8UC1);
  cv::randu(gray, 0, 256);
  write_png(gray, dir / "g.png");
  const Raster img = load_image(dir / "g.png");
  CHECK(img.width() == 512);
  CHECK(img.height() == 512);
  REQUIRE(img.channels() == 3);
  bool equal = true;
  for (int r = 0; r < 512; ++r) {
    for (int c = 0; c < 512; ++c) {
      const auto g = gray.at<std::uint8_t>(r, c);
      equal &= img.at(r, c, 0) == g && img.at(r, c, 1) == g && img.at(r, c, 2) == g;
    }
  }
  CHECK(equal);
}

TEST_CASE("load_image: alpha channel dropped") {
  TempDir dir;
  cv::Mat bgra(4, 5, CV_8UC4, cv::Scalar(10, 20, 30, 7));
  write_png(bgra, dir / "a.png");
  const Raster img = load_image(dir / "a.png");
  CHECK(img.channels() == 3);
  CHECK(img.at(3, 4, 0) == 30);
  CHECK(img.at(3, 4, 2) == 10);
}

TEST_CASE("load_image: 16-bit tiff is unsupported, missing file not found") {
  TempDir dir;
  cv::Mat deep(8, 8, CV_16UC3, cv::Scalar(1000, 2000, 3000));
  REQUIRE(cv::imwrite((dir / "deep.tif").string(), deep));
  CHECK_ERROR_CODE(load_image(dir / "deep.tif"), ErrorCode::UnsupportedFormat);
  CHECK_ERROR_CODE(load_image(dir / "nope.png"), ErrorCode::FileNotFound);
  write_file_atomic(dir / "junk.png", std::string_view("not an image"));
  CHECK_ERROR_CODE(load_image(dir / "junk.png"), ErrorCode::UnsupportedFormat);
}

TEST_CASE("load_mask: encodings") {
  TempDir dir;
  cv::Mat m(6, 6, CV_8UC1, cv::Scalar(0));
  m.at<std::uint8_t>(2, 3) = 255;
  m.at<std::uint8_t>(5, 0) = 255;
  write_png(m, dir / "m255.png");
  const BinaryMask a = load_mask(dir / "m255.png");
  CHECK(a.count() == 2);
  CHECK(a.at(2, 3) == 1);
  CHECK(a.at(0, 0) == 0);

  m.setTo(0);
  write_png(m, dir / "zero.png");
  const BinaryMask z = load_mask(dir / "zero.png");
  CHECK(z.count() == 0);
  CHECK(z.width() == 6);

  m.at<std::uint8_t>(1, 1) = 1;
  write_png(m, dir / "m01.png");
  CHECK(load_mask(dir / "m01.png").at(1, 1) == 1);

  m.at<std::uint8_t>(4, 4) = 7;
  write_png(m, dir / "bad.png");
  CHECK_ERROR_CODE(load_mask(dir / "bad.png"), ErrorCode::InvalidMaskValues);

  cv::Mat rgb(4, 4, CV_8UC3, cv::Scalar(0, 0, 0));
  write_png(rgb, dir / "rgb.png");
  CHECK_ERROR_CODE(load_mask(dir / "rgb.png"), ErrorCode::UnsupportedFormat);
}

TEST_CASE("load_mask: randomized valid inputs stay binary") {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 64);
    const int h = 1 + static_cast<int>(rng() % 64);
    const std::uint8_t on = (trial % 2) ? 255 : 1;
    cv::Mat m(h, w, CV_8UC1);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) m.at<std::uint8_t>(r, c) = (rng() & 1) ? on : 0;
    const auto path = dir / ("m" + std::to_string(trial) + ".png");
    write_png(m, path);
    const BinaryMask mask = load_mask(path);
    bool binary = true;
    bool matches = true;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        binary &= mask.at(r, c) <= 1;
        matches &= mask.at(r, c) == (m.at<std::uint8_t>(r, c) != 0);
      }
    }
    CHECK(binary);
    CHECK(matches);
  }
}

TEST_CASE("save/load round trips") {
  TempDir dir;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 100);
    const int h = 1 + static_cast<int>(rng() % 100);
    const Raster img = testing::random_raster(rng, w, h);
    const BinaryMask mask = testing::random_mask(rng, w, h, 0.3);
    const ProbMap pm = testing::random_prob_map(rng, w, h);
    const std::string ext = trial % 2 ? ".tif" : ".png";
    save_image(img, dir / ("i" + ext));
    save_mask(mask, dir / ("m" + ext));
    save_prob_map(pm, dir / "p.pmap");
    CHECK(load_image(dir / ("i" + ext)) == img);
    CHECK(load_mask(dir / ("m" + ext)) == mask);
    CHECK(load_prob_map(dir / "p.pmap") == pm);
  }
}

TEST_CASE("save_mask writes 0/255 single channel") {
  TempDir dir;
  BinaryMask m(3, 2);
  m.set(1, 2, true);
  save_mask(m, dir / "m.png");
  cv::Mat raw = cv::imread((dir / "m.png").string(), cv::IMREAD_UNCHANGED);
  REQUIRE(raw.channels() == 1);
  CHECK(raw.at<std::uint8_t>(1, 2) == 255);
  CHECK(raw.at<std::uint8_t>(0, 0) == 0);
}

TEST_CASE("PMAP layout: constant 0.5 4x4") {
  TempDir dir;
  save_prob_map(ProbMap(4, 4, 0.5f), dir / "c.pmap");
  const auto bytes = read_file_bytes(dir / "c.pmap");
  REQUIRE(bytes.size() == 16 + 16 * 4);
  CHECK(std::memcmp(bytes.data(), "PMAP", 4) == 0);
  CHECK(le_u32(bytes, 4) == 1);
  CHECK(le_u32(bytes, 8) == 4);
  CHECK(le_u32(bytes, 12) == 4);
  for (int i = 0; i < 16; ++i) {
    // 0.5f is 0x3F000000
    CHECK(le_u32(bytes, 16 + 4 * i) == 0x3F000000u);
  }
}

TEST_CASE("PMAP: header records height before width") {
  const auto bytes = encode_prob_map(ProbMap(3, 2, 0.25f));
  CHECK(le_u32(bytes, 8) == 2);
  CHECK(le_u32(bytes, 12) == 3);
  const ProbMap back = decode_prob_map(bytes);
  CHECK(back.width() == 3);
  CHECK(back.height() == 2);
}

TEST_CASE("PMAP: arbitrary map round-trips bit-exact") {
  std::mt19937_64 rng(3);
  ProbMap pm = testing::random_prob_map(rng, 37, 19);
  pm.at(0, 0) = 0.0f;
  pm.at(1, 1) = 1.0f;
  pm.at(2, 2) = std::nextafter(0.5f, 1.0f);
  CHECK(decode_prob_map(encode_prob_map(pm)) == pm);
}

TEST_CASE("PMAP: malformed streams rejected") {
  auto bytes = encode_prob_map(ProbMap(2, 2, 0.1f));
  auto short_bytes = bytes;
  short_bytes.pop_back();
  CHECK_ERROR_CODE(decode_prob_map(short_bytes), ErrorCode::UnsupportedFormat);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_ERROR_CODE(decode_prob_map(bad_magic), ErrorCode::UnsupportedFormat);
  auto bad_version = bytes;
  bad_version[4] = 2;
  CHECK_ERROR_CODE(decode_prob_map(bad_version), ErrorCode::UnsupportedFormat);
  auto out_of_range = bytes;
  const float big = 1.5f;
  std::memcpy(out_of_range.data() + 16, &big, 4);
  CHECK_ERROR_CODE(decode_prob_map(out_of_range), ErrorCode::InvalidProbability);
}

TEST_CASE("unwritable path is an IoError") {
  TempDir dir;
  CHECK_ERROR_CODE(save_prob_map(ProbMap(2, 2), dir / "missing" / "x.pmap"), ErrorCode::IoError);
  CHECK_ERROR_CODE(save_mask(BinaryMask(2, 2), dir / "missing" / "x.png"), ErrorCode::IoError);
}

TEST_CASE("container invariants") {
  CHECK_ERROR_CODE(BinaryMask(2, 1, std::vector<std::uint8_t>{0, 2}), ErrorCode::InvalidMaskValues);
  CHECK_ERROR_CODE(ProbMap(2, 1, std::vector<float>{0.0f, 1.01f}), ErrorCode::InvalidProbability);
  CHECK_ERROR_CODE(ProbMap(1, 1, std::vector<float>{std::nanf("")}), ErrorCode::InvalidProbability);
  CHECK_ERROR_CODE(Raster(2, 2, 3, std::vector<std::uint8_t>(5)), ErrorCode::ShapeMismatch);
  ProbMap pm(2, 2, 0.5f);
  pm.at(0, 1) = -0.1f;
  CHECK_ERROR_CODE(pm.validate(), ErrorCode::InvalidProbability);
  CHECK(same_shape(BinaryMask(3, 4), BinaryMask(3, 4)));
  CHECK_FALSE(same_shape(BinaryMask(3, 4), BinaryMask(4, 3)));
}
