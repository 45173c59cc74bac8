#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lesionforge/cli/run_config.hpp"
#include "lesionforge/gamma.hpp"
#include "lesionforge/metrics.hpp"
#include "lesionforge/volume.hpp"

namespace lesionforge::cli {

/// Pipeline seed used for every sample of one study. Combined with the
/// sample index inside the pipeline, so each sample's draws depend only on
/// (master seed, study id, sample index).
std::uint64_t study_seed(std::uint64_t master_seed, const std::string& study_id) noexcept;

struct AugmentSummary {
  std::size_t studies_ok = 0;
  std::size_t studies_failed = 0;
  /// One line per failed study, in manifest order.
  std::vector<std::string> diagnostics;
  std::vector<std::filesystem::path> written;

  bool ok() const noexcept { return studies_failed == 0; }
};

/// Augments every study in the manifest. Paths in `config` resolve against
/// `base_dir`. A failing study is reported and skipped; the others still
/// run. Output bytes do not depend on `config.workers`.
AugmentSummary run_augment(const RunConfig& config, const std::filesystem::path& base_dir);

struct PreviewResult {
  std::vector<std::filesystem::path> images;
  std::size_t slice = 0;
  bool mask_empty = false;
};

/// Axial slice (fixed z) used for previews: the middle of the mask's z
/// extent, or the volume midpoint for an empty mask.
std::size_t preview_slice(const Mask3D& mask);

/// Binary PGM of slice z, windowed linearly from [lo, hi] to [0, 255] and
/// clamped. A flat window maps everything to 0.
void write_pgm(const std::filesystem::path& path, const Volume3D& vol, std::size_t z,
               double lo, double hi);

/// Writes original.pgm plus global_gamma_<g>.pgm and local_gamma_<g>.pgm per
/// gamma. All images share the window of the original slice so intensities
/// are comparable across the grid.
PreviewResult run_preview(const Volume3D& image, const Mask3D& mask,
                          std::span<const double> gammas,
                          const std::filesystem::path& out_dir);

std::vector<double> sample_gammas(const GammaSamplerSpec& spec, std::size_t n,
                                  std::uint64_t seed);

/// One value per line, printed with 17 significant digits.
void write_gammas(std::ostream& out, std::span<const double> values);

struct MetricsReport {
  std::vector<ImageLevelOutcome> outcomes;
  ConfusionCounts counts;
  /// Rows whose prediction could not be read.
  std::vector<std::string> failures;
};

MetricsReport run_metrics(const std::filesystem::path& manifest, double threshold);

/// Plain-text table with Sensitivity and Specificity columns.
std::string render_metrics_table(const std::string& label, const ConfusionCounts& counts);

/// label,n,tp,fp,tn,fn,sensitivity,specificity
std::string render_metrics_csv(const std::string& label, const ConfusionCounts& counts);

}  // namespace lesionforge::cli
