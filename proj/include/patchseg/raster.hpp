#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace patchseg {

// Top-left corner of a patch, in pixels.
struct Origin {
  int row = 0;
  int col = 0;

  friend bool operator==(const Origin&, const Origin&) = default;
  friend auto operator<=>(const Origin&, const Origin&) = default;
};

/// 8-bit image, row-major, channel-interleaved (RGB when channels == 3).
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels);
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::uint8_t& at(int row, int col, int channel) {
    return data_[index(row, col, channel)];
  }
  std::uint8_t at(int row, int col, int channel) const {
    return data_[index(row, col, channel)];
  }

  std::span<std::uint8_t> data() noexcept { return data_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int row, int col, int channel) const noexcept {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + channel;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Ground-truth or predicted segmentation: 0 = background, 1 = tumor.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0);
  // Throws InvalidMaskValues if any value is outside {0, 1}.
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::uint8_t at(int row, int col) const { return data_[index(row, col)]; }
  // Writes are normalized: any non-zero value stores 1.
  void set(int row, int col, bool tumor) { data_[index(row, col)] = tumor ? 1 : 0; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }

  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel tumor probability in [0, 1].
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(int width, int height, float fill = 0.0f);
  // Throws InvalidProbability if any value is outside [0, 1] or NaN.
  ProbMap(int width, int height, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  float at(int row, int col) const { return data_[index(row, col)]; }
  float& at(int row, int col) { return data_[index(row, col)]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  // Re-checks the [0, 1] invariant after mutable access.
  void validate() const;

  friend bool operator==(const ProbMap&, const ProbMap&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

bool same_shape(const BinaryMask& a, const BinaryMask& b) noexcept;
bool same_shape(const ProbMap& a, const ProbMap& b) noexcept;

// PNG or TIFF, 8-bit, 1/3/4 channels. Gray is replicated to RGB, alpha dropped.
Raster load_image(const std::filesystem::path& path);
// Single-channel 8-bit; {0,255} is normalized to {0,1}.
BinaryMask load_mask(const std::filesystem::path& path);

// Format chosen by extension (PNG or TIFF).
void save_image(const Raster& image, const std::filesystem::path& path);
// Written as {0,255} single-channel.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

// PMAP: "PMAP", u32 version = 1, u32 height, u32 width, float32[h*w], little-endian.
void save_prob_map(const ProbMap& map, const std::filesystem::path& path);
ProbMap load_prob_map(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_prob_map(const ProbMap& map);
ProbMap decode_prob_map(std::span<const std::uint8_t> bytes);

}  // namespace patchseg
