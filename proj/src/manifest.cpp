#include "patchseg/manifest.hpp"

#include <set>

#include "patchseg/errors.hpp"
#include "patchseg/fileio.hpp"

namespace patchseg {

namespace fs = std::filesystem;

const ManifestEntry& DatasetManifest::find(const std::string& image_id) const {
  for (const auto& e : entries) {
    if (e.image_id == image_id) return e;
  }
  throw Error(ErrorCode::InvalidManifest, "unknown image_id " + image_id);
}

void validate_manifest(const DatasetManifest& manifest) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    const auto where = "entry " + std::to_string(i);
    if (e.image_id.empty()) throw Error(ErrorCode::InvalidManifest, where + ": empty image_id");
    if (e.domain.empty()) throw Error(ErrorCode::InvalidManifest, where + ": empty domain");
    if (e.image_path.empty()) throw Error(ErrorCode::InvalidManifest, where + ": empty image_path");
    if (e.mask_path.empty()) throw Error(ErrorCode::InvalidManifest, where + ": empty mask_path");
    if (!seen.insert(e.image_id).second) {
      throw Error(ErrorCode::InvalidManifest, where + ": duplicate image_id " + e.image_id);
    }
  }
}

nlohmann::ordered_json manifest_to_json(const DatasetManifest& manifest) {
  nlohmann::ordered_json j;
  j["task_id"] = manifest.task_id;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json je;
    je["image_id"] = e.image_id;
    je["image_path"] = e.image_path.generic_string();
    je["mask_path"] = e.mask_path.generic_string();
    je["domain"] = e.domain;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  if (!j.is_object()) throw Error(ErrorCode::InvalidManifest, "manifest must be a JSON object");
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw Error(ErrorCode::InvalidManifest, "missing 'entries' array");
  }
  m.task_id = j.value("task_id", std::string{});
  const auto& entries = j["entries"];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& je = entries[i];
    const auto where = "entry " + std::to_string(i);
    ManifestEntry e;
    try {
      e.image_id = je.at("image_id").get<std::string>();
      e.image_path = je.at("image_path").get<std::string>();
      e.mask_path = je.at("mask_path").get<std::string>();
      e.domain = je.at("domain").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::InvalidManifest, where + ": " + ex.what());
    }
    m.entries.push_back(std::move(e));
  }
  validate_manifest(m);
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_text(path));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidManifest, path.string() + ": " + ex.what());
  }
  DatasetManifest m = manifest_from_json(j);
  const fs::path base = path.parent_path();
  for (auto& e : m.entries) {
    if (e.image_path.is_relative()) e.image_path = base / e.image_path;
    if (e.mask_path.is_relative()) e.mask_path = base / e.mask_path;
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_file_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace patchseg
