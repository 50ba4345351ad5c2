#include "patchseg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "endian.hpp"
#include "patchseg/errors.hpp"
#include "patchseg/fileio.hpp"

namespace patchseg {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kPmapVersion = 1;
constexpr std::size_t kPmapHeader = 16;

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "dimensions must be >= 1, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t pixel_count(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

cv::Mat read_any(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::FileNotFound, path.string());
  const auto bytes = read_file_bytes(path);
  cv::Mat mat;
  try {
    mat = cv::imdecode(cv::Mat(1, static_cast<int>(bytes.size()), CV_8U,
                               const_cast<std::uint8_t*>(bytes.data())),
                       cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + e.what());
  }
  if (mat.empty()) throw Error(ErrorCode::UnsupportedFormat, "cannot decode " + path.string());
  if (mat.depth() != CV_8U) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": bit depth is not 8");
  }
  return mat;
}

std::string encode_ext(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png" || ext == ".tif" || ext == ".tiff") return ext;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported output extension: " + path.string());
}

void write_mat(const cv::Mat& mat, const fs::path& path) {
  std::vector<std::uint8_t> buf;
  bool ok = false;
  try {
    ok = cv::imencode(encode_ext(path), mat, buf);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::IoError, "encode failed: " + path.string());
  write_file_atomic(path, buf);
}

}  // namespace

Raster::Raster(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height);
  if (channels < 1) throw Error(ErrorCode::InvalidArgument, "channels must be >= 1");
  data_.assign(pixel_count(width, height) * channels, 0);
}

Raster::Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height);
  if (channels < 1) throw Error(ErrorCode::InvalidArgument, "channels must be >= 1");
  if (data_.size() != pixel_count(width, height) * channels) {
    throw Error(ErrorCode::ShapeMismatch, "raster data length does not match dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  if (fill > 1) throw Error(ErrorCode::InvalidMaskValues, "fill must be 0 or 1");
  data_.assign(pixel_count(width, height), fill);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count(width, height)) {
    throw Error(ErrorCode::ShapeMismatch, "mask data length does not match dimensions");
  }
  if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw Error(ErrorCode::InvalidMaskValues, "mask values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

ProbMap::ProbMap(int width, int height, float fill) : width_(width), height_(height) {
  check_dims(width, height);
  if (!(fill >= 0.0f && fill <= 1.0f)) {
    throw Error(ErrorCode::InvalidProbability, "fill outside [0,1]");
  }
  data_.assign(pixel_count(width, height), fill);
}

ProbMap::ProbMap(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count(width, height)) {
    throw Error(ErrorCode::ShapeMismatch, "probability data length does not match dimensions");
  }
  validate();
}

void ProbMap::validate() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const float v = data_[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorCode::InvalidProbability,
                  "value " + std::to_string(v) + " at index " + std::to_string(i) + " outside [0,1]");
    }
  }
}

bool same_shape(const BinaryMask& a, const BinaryMask& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

bool same_shape(const ProbMap& a, const ProbMap& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

Raster load_image(const fs::path& path) {
  const cv::Mat mat = read_any(path);
  cv::Mat rgb;
  switch (mat.channels()) {
    case 1: cv::cvtColor(mat, rgb, cv::COLOR_GRAY2RGB); break;
    case 3: cv::cvtColor(mat, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(mat, rgb, cv::COLOR_BGRA2RGB); break;
    default:
      throw Error(ErrorCode::UnsupportedFormat,
                  path.string() + ": " + std::to_string(mat.channels()) + " channels");
  }
  if (!rgb.isContinuous()) rgb = rgb.clone();
  std::vector<std::uint8_t> data(rgb.datastart, rgb.dataend);
  return Raster(rgb.cols, rgb.rows, 3, std::move(data));
}

BinaryMask load_mask(const fs::path& path) {
  cv::Mat mat = read_any(path);
  if (mat.channels() != 1) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": mask must be single-channel");
  }
  if (!mat.isContinuous()) mat = mat.clone();
  std::vector<std::uint8_t> data(mat.datastart, mat.dataend);

  bool seen[256] = {};
  for (const auto v : data) seen[v] = true;
  bool only01 = true;
  bool only0255 = true;
  for (int v = 0; v < 256; ++v) {
    if (!seen[v]) continue;
    if (v != 0 && v != 1) only01 = false;
    if (v != 0 && v != 255) only0255 = false;
    if (!only01 && !only0255) {
      throw Error(ErrorCode::InvalidMaskValues, path.string() + ": value " + std::to_string(v));
    }
  }
  if (!only01) {
    for (auto& v : data) v = v == 255 ? 1 : 0;
  }
  return BinaryMask(mat.cols, mat.rows, std::move(data));
}

void save_image(const Raster& image, const fs::path& path) {
  const int type = CV_8UC(image.channels());
  cv::Mat view(image.height(), image.width(), type, const_cast<std::uint8_t*>(image.data().data()));
  cv::Mat out;
  switch (image.channels()) {
    case 1: out = view; break;
    case 3: cv::cvtColor(view, out, cv::COLOR_RGB2BGR); break;
    default:
      throw Error(ErrorCode::UnsupportedFormat, "can only save 1- or 3-channel rasters");
  }
  write_mat(out, path);
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  cv::Mat out(mask.height(), mask.width(), CV_8UC1);
  auto* dst = out.ptr<std::uint8_t>();
  const auto src = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
  write_mat(out, path);
}

std::vector<std::uint8_t> encode_prob_map(const ProbMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kPmapHeader + map.size() * 4);
  detail::put_magic(out, "PMAP");
  detail::put_u32(out, kPmapVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(map.height()));
  detail::put_u32(out, static_cast<std::uint32_t>(map.width()));
  for (const float v : map.data()) detail::put_f32(out, v);
  return out;
}

ProbMap decode_prob_map(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPmapHeader || !detail::has_magic(bytes, "PMAP")) {
    throw Error(ErrorCode::UnsupportedFormat, "not a PMAP stream");
  }
  const auto version = detail::get_u32(bytes, 4);
  if (version != kPmapVersion) {
    throw Error(ErrorCode::UnsupportedFormat, "PMAP version " + std::to_string(version));
  }
  const auto height = detail::get_u32(bytes, 8);
  const auto width = detail::get_u32(bytes, 12);
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (height == 0 || width == 0 || bytes.size() != kPmapHeader + n * 4) {
    throw Error(ErrorCode::UnsupportedFormat, "PMAP payload length does not match header");
  }
  std::vector<float> data(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = detail::get_f32(bytes, kPmapHeader + i * 4);
  return ProbMap(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

void save_prob_map(const ProbMap& map, const fs::path& path) {
  write_file_atomic(path, encode_prob_map(map));
}

ProbMap load_prob_map(const fs::path& path) {
  return decode_prob_map(read_file_bytes(path));
}

}  // namespace patchseg
