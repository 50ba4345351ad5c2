#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "patchseg/errors.hpp"
#include "patchseg/raster.hpp"

namespace testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

patchseg::BinaryMask random_mask(std::mt19937_64& rng, int width, int height, double density);
patchseg::ProbMap random_prob_map(std::mt19937_64& rng, int width, int height);
patchseg::Raster random_raster(std::mt19937_64& rng, int width, int height, int channels = 3);

// Location of the mock PSRQ/PSRS peer executable, baked in at build time.
std::string mock_peer_path();
std::string cli_path();

}  // namespace testing
