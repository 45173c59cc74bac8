#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lesionforge/nifti.hpp"
#include "lesionforge/volume.hpp"
#include "support/generators.hpp"

namespace lesionforge::testkit {

struct StudyFixture {
  std::filesystem::path manifest;
  std::vector<std::string> ids;
};

/// Writes `n` synthetic studies (float32 channels, optional mask) and a wide
/// manifest next to them. Studies listed in `without_mask` get an empty
/// mask cell.
inline StudyFixture write_study_fixture(const std::filesystem::path& dir, std::size_t n,
                                        Dims dims, const std::vector<std::string>& channels,
                                        std::uint64_t seed,
                                        const std::vector<std::size_t>& without_mask = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "in");
  std::mt19937_64 rng(seed);
  StudyFixture fx;
  fx.manifest = dir / "manifest.csv";
  std::ofstream csv(fx.manifest);
  csv << "study_id,mask";
  for (const auto& c : channels) csv << "," << c;
  csv << "\n";
  for (std::size_t s = 0; s < n; ++s) {
    const std::string id = "study" + std::to_string(s);
    fx.ids.push_back(id);
    csv << id << ",";
    const bool has_mask =
        std::find(without_mask.begin(), without_mask.end(), s) == without_mask.end();
    if (has_mask) {
      const auto mask = random_blob_mask(rng, dims);
      nifti::write_volume(mask_to_volume(mask), dir / "in" / (id + "_mask.nii.gz"));
      csv << "in/" << id << "_mask.nii.gz";
    }
    for (const auto& c : channels) {
      std::uniform_real_distribution<double> u(0.0, 1000.0);
      std::vector<double> data(dims.count());
      for (auto& x : data) x = u(rng);
      const Volume3D vol(dims, {1.0, 1.0, 1.0}, std::move(data));
      const auto path = "in/" + id + "_" + c + ".nii.gz";
      nifti::write_volume(vol, dir / path);
      csv << "," << path;
    }
    csv << "\n";
  }
  return fx;
}

inline std::vector<char> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// True when both directory trees hold the same relative paths with the same
/// bytes. `diff` receives the first mismatch.
inline bool trees_identical(const std::filesystem::path& a, const std::filesystem::path& b,
                            std::string* diff = nullptr) {
  namespace fs = std::filesystem;
  auto list = [](const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto la = list(a), lb = list(b);
  if (la != lb) {
    if (diff) *diff = "file lists differ";
    return false;
  }
  for (const auto& rel : la) {
    if (read_file(a / rel) != read_file(b / rel)) {
      if (diff) *diff = rel.string();
      return false;
    }
  }
  return true;
}

}  // namespace lesionforge::testkit
