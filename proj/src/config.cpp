#include "patchseg/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "patchseg/errors.hpp"
#include "patchseg/fileio.hpp"

namespace patchseg {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct Value {
  std::string raw;
  int line = 0;

  [[noreturn]] void bad(const char* what) const {
    throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line) + ": expected " + what +
                                              ", got '" + raw + "'");
  }
  double number() const {
    double v = 0.0;
    const auto* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc() || ptr != end) bad("a number");
    return v;
  }
  long long integer() const {
    long long v = 0;
    const auto* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc() || ptr != end) bad("an integer");
    return v;
  }
  bool boolean() const {
    if (raw == "true") return true;
    if (raw == "false") return false;
    bad("true or false");
  }
};

using Setter = std::function<void(PipelineConfig&, const Value&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> s;
  s["patch_size"] = [](auto& c, const Value& v) { c.patch_size = static_cast<int>(v.integer()); };
  s["stride"] = [](auto& c, const Value& v) { c.stride = static_cast<int>(v.integer()); };
  s["kernel_sigma"] = [](auto& c, const Value& v) { c.kernel_sigma = v.number(); };
  s["threshold"] = [](auto& c, const Value& v) { c.threshold = static_cast<float>(v.number()); };
  s["samples_per_epoch"] = [](auto& c, const Value& v) {
    const auto n = v.integer();
    if (n < 0) v.bad("a non-negative integer");
    c.samples_per_epoch = static_cast<std::size_t>(n);
  };
  s["weight_floor"] = [](auto& c, const Value& v) { c.weight_floor = v.number(); };
  s["seed"] = [](auto& c, const Value& v) {
    const auto n = v.integer();
    if (n < 0) v.bad("a non-negative integer");
    c.seed = static_cast<std::uint64_t>(n);
  };
  s["workers"] = [](auto& c, const Value& v) { c.workers = static_cast<int>(v.integer()); };

  s["augmentation.probability"] = [](auto& c, const Value& v) {
    c.augmentation.set_all_probabilities(v.number());
  };
  for (int i = 0; i < kTransformCount; ++i) {
    const auto t = static_cast<Transform>(i);
    s["augmentation.p_" + std::string(to_string(t))] = [t](auto& c, const Value& v) {
      c.augmentation.p(t) = v.number();
    };
  }
  auto interval = [&s](const std::string& name, Interval AugmentationConfig::*field) {
    s["augmentation." + name + "_min"] = [field](auto& c, const Value& v) { (c.augmentation.*field).lo = v.number(); };
    s["augmentation." + name + "_max"] = [field](auto& c, const Value& v) { (c.augmentation.*field).hi = v.number(); };
  };
  interval("rotation_degrees", &AugmentationConfig::rotation_degrees);
  interval("gamma", &AugmentationConfig::gamma);
  interval("contrast", &AugmentationConfig::contrast);
  interval("solarize_threshold", &AugmentationConfig::solarize_threshold);
  interval("blur_sigma", &AugmentationConfig::blur_sigma);
  interval("scale", &AugmentationConfig::scale);
  s["augmentation.rot90_min_turns"] = [](auto& c, const Value& v) { c.augmentation.rot90_min_turns = static_cast<int>(v.integer()); };
  s["augmentation.rot90_max_turns"] = [](auto& c, const Value& v) { c.augmentation.rot90_max_turns = static_cast<int>(v.integer()); };
  s["augmentation.hue_shift_degrees"] = [](auto& c, const Value& v) { c.augmentation.hue_shift_degrees = v.number(); };
  s["augmentation.saturation_shift"] = [](auto& c, const Value& v) { c.augmentation.saturation_shift = v.number(); };
  s["augmentation.value_shift"] = [](auto& c, const Value& v) { c.augmentation.value_shift = v.number(); };

  s["loss.label_smoothing"] = [](auto& c, const Value& v) { c.loss.label_smoothing = v.number(); };
  s["loss.aux_head_weight"] = [](auto& c, const Value& v) { c.loss.aux_head_weight = v.number(); };
  s["loss.dice_epsilon"] = [](auto& c, const Value& v) { c.loss.dice_epsilon = v.number(); };
  s["loss.hard_pixel_top_k"] = [](auto& c, const Value& v) { c.loss.hard_pixel_top_k = v.number(); };

  s["schedule.total_epochs"] = [](auto& c, const Value& v) { c.schedule.total_epochs = static_cast<int>(v.integer()); };
  s["schedule.warmup_epochs"] = [](auto& c, const Value& v) { c.schedule.warmup_epochs = static_cast<int>(v.integer()); };
  s["schedule.lr_max"] = [](auto& c, const Value& v) { c.schedule.lr_max = v.number(); };
  s["schedule.lr_min"] = [](auto& c, const Value& v) { c.schedule.lr_min = v.number(); };
  return s;
}

}  // namespace

void PipelineConfig::validate() const {
  if (patch_size < 1) throw Error(ErrorCode::InvalidConfig, "patch_size must be >= 1");
  if (stride < 1 || stride > patch_size) throw Error(ErrorCode::InvalidConfig, "stride must be in [1, patch_size]");
  if (!(kernel_sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "kernel_sigma must be > 0");
  if (!(threshold >= 0.0f && threshold <= 1.0f)) throw Error(ErrorCode::InvalidConfig, "threshold must be in [0,1]");
  if (!(weight_floor > 0.0 && weight_floor <= 1.0)) throw Error(ErrorCode::InvalidConfig, "weight_floor must be in (0,1]");
  if (workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
  augmentation.validate();
  loss.validate();
  schedule.validate();
}

PipelineConfig parse_config(std::string_view text, PipelineConfig config) {
  static const auto table = setters();
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const auto line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": bad section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!section.empty() && section != "augmentation" && section != "loss" && section != "schedule") {
        throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = std::string(trim(line.substr(0, eq)));
    std::string value = std::string(trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = table.find(full);
    if (it == table.end()) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": unknown key " + full);
    }
    it->second(config, Value{value, line_no});
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file_text(path));
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["patch_size"] = c.patch_size;
  j["stride"] = c.stride;
  j["kernel_sigma"] = c.kernel_sigma;
  j["threshold"] = c.threshold;
  j["samples_per_epoch"] = c.samples_per_epoch;
  j["weight_floor"] = c.weight_floor;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  auto& aug = j["augmentation"];
  for (int i = 0; i < kTransformCount; ++i) {
    aug["p_" + std::string(to_string(static_cast<Transform>(i)))] = c.augmentation.probability[i];
  }
  aug["rotation_degrees"] = {c.augmentation.rotation_degrees.lo, c.augmentation.rotation_degrees.hi};
  aug["rot90_turns"] = {c.augmentation.rot90_min_turns, c.augmentation.rot90_max_turns};
  aug["gamma"] = {c.augmentation.gamma.lo, c.augmentation.gamma.hi};
  aug["contrast"] = {c.augmentation.contrast.lo, c.augmentation.contrast.hi};
  aug["solarize_threshold"] = {c.augmentation.solarize_threshold.lo, c.augmentation.solarize_threshold.hi};
  aug["hue_shift_degrees"] = c.augmentation.hue_shift_degrees;
  aug["saturation_shift"] = c.augmentation.saturation_shift;
  aug["value_shift"] = c.augmentation.value_shift;
  aug["blur_sigma"] = {c.augmentation.blur_sigma.lo, c.augmentation.blur_sigma.hi};
  aug["scale"] = {c.augmentation.scale.lo, c.augmentation.scale.hi};
  auto& loss = j["loss"];
  loss["label_smoothing"] = c.loss.label_smoothing;
  loss["aux_head_weight"] = c.loss.aux_head_weight;
  loss["dice_epsilon"] = c.loss.dice_epsilon;
  loss["hard_pixel_top_k"] = c.loss.hard_pixel_top_k ? nlohmann::ordered_json(*c.loss.hard_pixel_top_k) : nlohmann::ordered_json();
  auto& sched = j["schedule"];
  sched["total_epochs"] = c.schedule.total_epochs;
  sched["warmup_epochs"] = c.schedule.warmup_epochs;
  sched["lr_max"] = c.schedule.lr_max;
  sched["lr_min"] = c.schedule.lr_min;
  return j;
}

}  // namespace patchseg
