#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lesionforge/nifti.hpp"
#include "lesionforge/pipeline.hpp"

namespace lesionforge::cli {

/// Batch job description for `lesionforge augment`.
///
///   { "schema_version": 1, "manifest": "studies.csv", "output_dir": "out",
///     "seed": 42, "workers": 4, "output_datatype": "float32", "gzip_level": 6,
///     "pipeline": { "samples_per_study": 3, "ops": [ ... ] } }
///
/// Relative paths are resolved against the directory holding the config
/// file. The top-level seed is the master seed; it overrides pipeline.seed.
struct RunConfig {
  std::string manifest;
  std::string output_dir = "augmented";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  nifti::OutputDatatype output_datatype = nifti::OutputDatatype::Float32;
  int gzip_level = 6;
  PipelineConfig pipeline;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws config with the offending key.
RunConfig parse_run_config(std::string_view json);
std::string serialize_run_config(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace lesionforge::cli
