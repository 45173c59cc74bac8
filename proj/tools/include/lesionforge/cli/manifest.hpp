#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lesionforge::cli {

/// Splits one CSV line on commas and trims surrounding whitespace. Quoting
/// is not supported; paths must not contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

/// One row of a study manifest. The header names the columns:
///
///   study_id,mask,b0,b1000,adc,flair
///
/// `study_id` is required, `mask` is optional, every other column is a
/// channel. Empty cells mean "absent". Relative paths resolve against the
/// manifest's directory.
struct StudyRow {
  std::string study_id;
  std::map<std::string, std::filesystem::path> channels;
  std::optional<std::filesystem::path> mask;
};

std::vector<StudyRow> parse_study_manifest(const std::filesystem::path& path);

/// Metrics manifest row: study_id,prediction_path,actual_label (0 or 1).
struct MetricsRow {
  std::string study_id;
  std::filesystem::path prediction;
  bool actual = false;
};

std::vector<MetricsRow> parse_metrics_manifest(const std::filesystem::path& path);

}  // namespace lesionforge::cli
