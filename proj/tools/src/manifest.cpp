#include "lesionforge/cli/manifest.hpp"

#include <algorithm>
#include <fstream>

#include "lesionforge/error.hpp"

namespace lesionforge::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.push_back(split_csv_line(t));
  }
  if (rows.empty()) throw Error(ErrorKind::Config, path.string() + ": manifest is empty");
  return rows;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& cell) {
  std::filesystem::path p(cell);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::vector<StudyRow> parse_study_manifest(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  const auto& header = rows.front();
  const auto where = path.string() + ": ";
  if (header.empty() || header[0] != "study_id") {
    throw Error(ErrorKind::Config, where + "first column must be 'study_id'");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw Error(ErrorKind::Config, where + "empty column name");
    if (std::count(header.begin(), header.end(), header[c]) > 1) {
      throw Error(ErrorKind::Config, where + "duplicate column '" + header[c] + "'");
    }
  }
  const auto base = path.parent_path();
  std::vector<StudyRow> studies;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorKind::Config, where + "row " + std::to_string(r) + " has " +
                                         std::to_string(row.size()) + " cells, expected " +
                                         std::to_string(header.size()));
    }
    StudyRow study;
    study.study_id = row[0];
    if (study.study_id.empty()) {
      throw Error(ErrorKind::Config, where + "row " + std::to_string(r) + " has no study_id");
    }
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c].empty()) continue;
      if (header[c] == "mask") {
        study.mask = resolve(base, row[c]);
      } else {
        study.channels.emplace(header[c], resolve(base, row[c]));
      }
    }
    const bool duplicate = std::any_of(studies.begin(), studies.end(), [&](const StudyRow& s) {
      return s.study_id == study.study_id;
    });
    if (duplicate) {
      throw Error(ErrorKind::DuplicateId, where + "study id '" + study.study_id + "' repeats");
    }
    studies.push_back(std::move(study));
  }
  return studies;
}

std::vector<MetricsRow> parse_metrics_manifest(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  const auto where = path.string() + ": ";
  const std::vector<std::string> expected{"study_id", "prediction_path", "actual_label"};
  if (rows.front() != expected) {
    throw Error(ErrorKind::Config,
                where + "header must be study_id,prediction_path,actual_label");
  }
  const auto base = path.parent_path();
  std::vector<MetricsRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) {
      throw Error(ErrorKind::Config, where + "row " + std::to_string(r) + " needs 3 cells");
    }
    if (row[2] != "0" && row[2] != "1") {
      throw Error(ErrorKind::Config,
                  where + "row " + std::to_string(r) + ": actual_label must be 0 or 1");
    }
    out.push_back({row[0], resolve(base, row[1]), row[2] == "1"});
  }
  return out;
}

}  // namespace lesionforge::cli
