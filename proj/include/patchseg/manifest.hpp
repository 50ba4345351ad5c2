#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace patchseg {

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path image_path;
  std::filesystem::path mask_path;
  std::string domain;  // organ or scanner label
};

struct DatasetManifest {
  std::string task_id;
  std::vector<ManifestEntry> entries;

  const ManifestEntry& find(const std::string& image_id) const;
};

// Unique ids, non-empty ids/domains/paths. Throws InvalidManifest naming the
// offending entry index.
void validate_manifest(const DatasetManifest& manifest);

// {"task_id": str, "entries": [{"image_id", "image_path", "mask_path", "domain"}]}
nlohmann::ordered_json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

// Relative paths are resolved against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace patchseg
