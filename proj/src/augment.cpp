#include "patchseg/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "patchseg/errors.hpp"
#include "patchseg/rng.hpp"

namespace patchseg {

namespace {

cv::Mat view(const Raster& r) {
  return cv::Mat(r.height(), r.width(), CV_8UC(r.channels()),
                 const_cast<std::uint8_t*>(r.data().data()));
}

cv::Mat view(const BinaryMask& m) {
  return cv::Mat(m.height(), m.width(), CV_8UC1, const_cast<std::uint8_t*>(m.data().data()));
}

Raster to_raster(const cv::Mat& mat) {
  cv::Mat c = mat.isContinuous() ? mat : mat.clone();
  return Raster(c.cols, c.rows, c.channels(), std::vector<std::uint8_t>(c.datastart, c.dataend));
}

BinaryMask to_mask(const cv::Mat& mat) {
  cv::Mat c = mat.isContinuous() ? mat : mat.clone();
  return BinaryMask(c.cols, c.rows, std::vector<std::uint8_t>(c.datastart, c.dataend));
}

template <typename T>
T rotate90_impl(const T& src, int turns) {
  turns = ((turns % 4) + 4) % 4;
  if (turns == 0) return src;
  static constexpr cv::RotateFlags kFlags[] = {cv::ROTATE_90_COUNTERCLOCKWISE, cv::ROTATE_180,
                                               cv::ROTATE_90_CLOCKWISE};
  cv::Mat out;
  cv::rotate(view(src), out, kFlags[turns - 1]);
  if constexpr (std::is_same_v<T, Raster>) {
    return to_raster(out);
  } else {
    return to_mask(out);
  }
}

template <typename T>
T flip_impl(const T& src, int code) {
  cv::Mat out;
  cv::flip(view(src), out, code);
  if constexpr (std::is_same_v<T, Raster>) {
    return to_raster(out);
  } else {
    return to_mask(out);
  }
}

cv::Mat fit_to(const cv::Mat& src, int height, int width) {
  // Center-crop each axis that is too large, reflect-pad each that is too small.
  cv::Mat out = src;
  if (out.rows > height || out.cols > width) {
    const int top = std::max(0, (out.rows - height) / 2);
    const int left = std::max(0, (out.cols - width) / 2);
    out = out(cv::Rect(left, top, std::min(width, out.cols), std::min(height, out.rows))).clone();
  }
  if (out.rows < height || out.cols < width) {
    const int dy = height - out.rows;
    const int dx = width - out.cols;
    cv::Mat padded;
    cv::copyMakeBorder(out, padded, dy / 2, dy - dy / 2, dx / 2, dx - dx / 2,
                       cv::BORDER_REFLECT_101);
    out = padded;
  }
  return out;
}

void check_interval(const Interval& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw Error(ErrorCode::InvalidConfig, std::string(name) + ": empty or invalid range");
  }
}

}  // namespace

std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::Rot90: return "rot90";
    case Transform::FlipHorizontal: return "flip_horizontal";
    case Transform::FlipVertical: return "flip_vertical";
    case Transform::Rotate: return "rotate";
    case Transform::Scale: return "scale";
    case Transform::Gamma: return "gamma";
    case Transform::Contrast: return "contrast";
    case Transform::Equalize: return "equalize";
    case Transform::Solarize: return "solarize";
    case Transform::HsvShift: return "hsv";
    case Transform::Blur: return "blur";
  }
  return "unknown";
}

bool is_geometric(Transform t) { return static_cast<int>(t) <= static_cast<int>(Transform::Scale); }

void AugmentationConfig::validate() const {
  for (int i = 0; i < kTransformCount; ++i) {
    if (!(probability[i] >= 0.0 && probability[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, std::string(to_string(static_cast<Transform>(i))) +
                                                " probability outside [0,1]");
    }
  }
  check_interval(rotation_degrees, "rotation_degrees");
  check_interval(gamma, "gamma");
  check_interval(contrast, "contrast");
  check_interval(solarize_threshold, "solarize_threshold");
  check_interval(blur_sigma, "blur_sigma");
  check_interval(scale, "scale");
  if (rot90_min_turns < 0 || rot90_min_turns > rot90_max_turns) {
    throw Error(ErrorCode::InvalidConfig, "rot90 turns: empty range");
  }
  if (gamma.lo <= 0.0) throw Error(ErrorCode::InvalidConfig, "gamma must be positive");
  if (scale.lo <= 0.0) throw Error(ErrorCode::InvalidConfig, "scale must be positive");
  if (blur_sigma.lo <= 0.0) throw Error(ErrorCode::InvalidConfig, "blur sigma must be positive");
  if (solarize_threshold.lo < 0.0 || solarize_threshold.hi > 256.0) {
    throw Error(ErrorCode::InvalidConfig, "solarize threshold outside [0,256]");
  }
  if (hue_shift_degrees < 0.0 || saturation_shift < 0.0 || value_shift < 0.0 ||
      saturation_shift >= 1.0 || value_shift >= 1.0) {
    throw Error(ErrorCode::InvalidConfig, "hsv shift amplitudes out of range");
  }
}

bool AugmentationDraw::any() const {
  return std::any_of(applied.begin(), applied.end(), [](bool b) { return b; });
}

AugmentationDraw draw_augmentation(const AugmentationConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  AugmentationDraw d;
  for (int i = 0; i < kTransformCount; ++i) d.applied[i] = rng.bernoulli(config.probability[i]);
  d.rot90_turns = rng.uniform_int(config.rot90_min_turns, config.rot90_max_turns);
  d.angle_degrees = rng.uniform(config.rotation_degrees.lo, config.rotation_degrees.hi);
  d.scale = rng.uniform(config.scale.lo, config.scale.hi);
  d.gamma = rng.uniform(config.gamma.lo, config.gamma.hi);
  d.contrast = rng.uniform(config.contrast.lo, config.contrast.hi);
  d.solarize_threshold = rng.uniform_int(static_cast<int>(std::ceil(config.solarize_threshold.lo)),
                                         static_cast<int>(std::floor(config.solarize_threshold.hi)));
  d.hue_shift_degrees = rng.uniform(-config.hue_shift_degrees, config.hue_shift_degrees);
  d.saturation_scale = 1.0 + rng.uniform(-config.saturation_shift, config.saturation_shift);
  d.value_scale = 1.0 + rng.uniform(-config.value_shift, config.value_shift);
  d.blur_sigma = rng.uniform(config.blur_sigma.lo, config.blur_sigma.hi);
  return d;
}

std::pair<Raster, BinaryMask> apply_augmentation(const Raster& patch, const BinaryMask& mask,
                                                 const AugmentationDraw& d) {
  if (patch.width() != patch.height() || patch.width() != mask.width() ||
      patch.height() != mask.height()) {
    throw Error(ErrorCode::ShapeMismatch, "augmentation needs a square patch and matching mask");
  }
  Raster img = patch;
  BinaryMask m = mask;

  if (d.on(Transform::Rot90)) {
    img = rotate90(img, d.rot90_turns);
    m = rotate90(m, d.rot90_turns);
  }
  if (d.on(Transform::FlipHorizontal)) {
    img = flip_horizontal(img);
    m = flip_horizontal(m);
  }
  if (d.on(Transform::FlipVertical)) {
    img = flip_vertical(img);
    m = flip_vertical(m);
  }
  if (d.on(Transform::Rotate)) std::tie(img, m) = rotate(img, m, d.angle_degrees);
  if (d.on(Transform::Scale)) std::tie(img, m) = rescale(img, m, d.scale);

  if (d.on(Transform::Gamma)) img = adjust_gamma(img, d.gamma);
  if (d.on(Transform::Contrast)) img = adjust_contrast(img, d.contrast);
  if (d.on(Transform::Equalize)) img = equalize_histogram(img);
  if (d.on(Transform::Solarize)) img = solarize(img, d.solarize_threshold);
  if (d.on(Transform::HsvShift)) {
    img = shift_hsv(img, d.hue_shift_degrees, d.saturation_scale, d.value_scale);
  }
  if (d.on(Transform::Blur)) img = gaussian_blur(img, d.blur_sigma);
  return {std::move(img), std::move(m)};
}

std::pair<Raster, BinaryMask> apply_augmentation(const Raster& patch, const BinaryMask& mask,
                                                 const AugmentationConfig& config,
                                                 std::uint64_t seed) {
  return apply_augmentation(patch, mask, draw_augmentation(config, seed));
}

Raster rotate90(const Raster& image, int turns) { return rotate90_impl(image, turns); }
BinaryMask rotate90(const BinaryMask& mask, int turns) { return rotate90_impl(mask, turns); }
Raster flip_horizontal(const Raster& image) { return flip_impl(image, 1); }
BinaryMask flip_horizontal(const BinaryMask& mask) { return flip_impl(mask, 1); }
Raster flip_vertical(const Raster& image) { return flip_impl(image, 0); }
BinaryMask flip_vertical(const BinaryMask& mask) { return flip_impl(mask, 0); }

std::pair<Raster, BinaryMask> rotate(const Raster& image, const BinaryMask& mask, double degrees) {
  const cv::Point2f center((image.width() - 1) / 2.0f, (image.height() - 1) / 2.0f);
  const cv::Mat m = cv::getRotationMatrix2D(center, degrees, 1.0);
  const cv::Size size(image.width(), image.height());
  cv::Mat img_out;
  cv::Mat mask_out;
  cv::warpAffine(view(image), img_out, m, size, cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
  cv::warpAffine(view(mask), mask_out, m, size, cv::INTER_NEAREST, cv::BORDER_REFLECT_101);
  return {to_raster(img_out), to_mask(mask_out)};
}

std::pair<Raster, BinaryMask> rescale(const Raster& image, const BinaryMask& mask, double factor) {
  const int w = std::max(1, static_cast<int>(std::lround(image.width() * factor)));
  const int h = std::max(1, static_cast<int>(std::lround(image.height() * factor)));
  cv::Mat img_scaled;
  cv::Mat mask_scaled;
  cv::resize(view(image), img_scaled, cv::Size(w, h), 0, 0, cv::INTER_LINEAR);
  cv::resize(view(mask), mask_scaled, cv::Size(w, h), 0, 0, cv::INTER_NEAREST);
  return {to_raster(fit_to(img_scaled, image.height(), image.width())),
          to_mask(fit_to(mask_scaled, mask.height(), mask.width()))};
}

Raster adjust_gamma(const Raster& image, double gamma) {
  cv::Mat lut(1, 256, CV_8U);
  for (int v = 0; v < 256; ++v) {
    lut.at<std::uint8_t>(v) =
        cv::saturate_cast<std::uint8_t>(std::lround(255.0 * std::pow(v / 255.0, gamma)));
  }
  cv::Mat out;
  cv::LUT(view(image), lut, out);
  return to_raster(out);
}

Raster adjust_contrast(const Raster& image, double factor) {
  cv::Mat gray;
  const cv::Mat src = view(image);
  if (image.channels() == 3) {
    cv::cvtColor(src, gray, cv::COLOR_RGB2GRAY);
  } else {
    gray = src;
  }
  const double mean = cv::mean(gray)[0];
  cv::Mat lut(1, 256, CV_8U);
  for (int v = 0; v < 256; ++v) {
    lut.at<std::uint8_t>(v) = cv::saturate_cast<std::uint8_t>(std::lround(mean + factor * (v - mean)));
  }
  cv::Mat out;
  cv::LUT(src, lut, out);
  return to_raster(out);
}

Raster equalize_histogram(const Raster& image) {
  const cv::Mat src = view(image);
  if (image.channels() == 1) {
    cv::Mat out;
    cv::equalizeHist(src, out);
    return to_raster(out);
  }
  cv::Mat ycc;
  cv::cvtColor(src, ycc, cv::COLOR_RGB2YCrCb);
  std::vector<cv::Mat> planes;
  cv::split(ycc, planes);
  cv::equalizeHist(planes[0], planes[0]);
  cv::merge(planes, ycc);
  cv::Mat out;
  cv::cvtColor(ycc, out, cv::COLOR_YCrCb2RGB);
  return to_raster(out);
}

Raster solarize(const Raster& image, int threshold) {
  Raster out = image;
  for (auto& v : out.data()) {
    if (v >= threshold) v = static_cast<std::uint8_t>(255 - v);
  }
  return out;
}

Raster shift_hsv(const Raster& image, double hue_degrees, double saturation_scale,
                 double value_scale) {
  if (image.channels() != 3) throw Error(ErrorCode::ShapeMismatch, "HSV shift needs RGB input");
  cv::Mat hsv;
  cv::cvtColor(view(image), hsv, cv::COLOR_RGB2HSV);
  // 8-bit hue is stored in half-degrees, [0, 180).
  const int hue_units = static_cast<int>(std::lround(hue_degrees / 2.0));
  for (int r = 0; r < hsv.rows; ++r) {
    auto* px = hsv.ptr<cv::Vec3b>(r);
    for (int c = 0; c < hsv.cols; ++c) {
      px[c][0] = static_cast<std::uint8_t>(((px[c][0] + hue_units) % 180 + 180) % 180);
      px[c][1] = cv::saturate_cast<std::uint8_t>(std::lround(px[c][1] * saturation_scale));
      px[c][2] = cv::saturate_cast<std::uint8_t>(std::lround(px[c][2] * value_scale));
    }
  }
  cv::Mat out;
  cv::cvtColor(hsv, out, cv::COLOR_HSV2RGB);
  return to_raster(out);
}

Raster gaussian_blur(const Raster& image, double sigma) {
  cv::Mat out;
  cv::GaussianBlur(view(image), out, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT_101);
  return to_raster(out);
}

}  // namespace patchseg
