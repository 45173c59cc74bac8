#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lesionforge/cli/commands.hpp"
#include "lesionforge/cli/run_config.hpp"
#include "lesionforge/error.hpp"
#include "lesionforge/nifti.hpp"
#include "lesionforge/pipeline_config.hpp"

namespace fs = std::filesystem;
using namespace lesionforge;

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("lesionforge");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("LESIONFORGE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

std::string read_spec_argument(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + arg.substr(1) + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
  }
  return arg;
}

int augment(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> workers, std::optional<std::string> out) {
  auto config = cli::load_run_config(config_path);
  if (seed) config.seed = config.pipeline.seed = *seed;
  if (workers) config.workers = *workers;
  if (out) config.output_dir = fs::absolute(*out).string();
  const auto base = fs::path(config_path).parent_path();
  const auto summary = cli::run_augment(config, base);
  for (const auto& line : summary.diagnostics) std::cerr << "failed: " << line << "\n";
  std::cout << summary.studies_ok << " studies augmented, " << summary.studies_failed
            << " failed\n";
  return summary.ok() ? 0 : 1;
}

int preview(const std::string& image_path, const std::string& mask_path,
            const std::vector<double>& gammas, const std::string& out) {
  const auto [image, header] = nifti::read_volume(image_path);
  Mask3D mask = Mask3D::zeros(image.dims());
  if (!mask_path.empty()) mask = validate_mask(nifti::read_volume(mask_path).first);
  const auto result = cli::run_preview(image, mask, gammas, out);
  if (result.mask_empty) {
    spdlog::warn("mask is empty; preview centred on the volume midpoint (z={})", result.slice);
  }
  for (const auto& p : result.images) std::cout << p.string() << "\n";
  return 0;
}

int sample_gamma(const std::string& spec_arg, std::size_t n, std::uint64_t seed,
                 const std::string& out) {
  const GammaSamplerSpec spec =
      spec_arg.empty() ? GammaSamplerSpec{MixtureUniform{}} : parse_sampler_spec(read_spec_argument(spec_arg));
  const auto values = cli::sample_gammas(spec, n, seed);
  if (out.empty() || out == "-") {
    cli::write_gammas(std::cout, values);
  } else {
    std::ofstream file(out);
    if (!file) throw Error(ErrorKind::Io, "cannot open '" + out + "' for writing");
    cli::write_gammas(file, values);
  }
  return 0;
}

int metrics(const std::string& manifest, double threshold, const std::string& out,
            const std::string& label) {
  const auto report = cli::run_metrics(manifest, threshold);
  if (!report.failures.empty()) {
    for (const auto& f : report.failures) std::cerr << "unreadable: " << f << "\n";
    return 1;
  }
  const auto table = cli::render_metrics_table(label, report.counts);
  std::cout << table;
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(fs::path(out) / "metrics_report.txt") << table;
    std::ofstream(fs::path(out) / "metrics_report.csv")
        << cli::render_metrics_csv(label, report.counts);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"lesionforge: mask-aware gamma augmentation for 3D volumes"};
  app.require_subcommand(1);

  auto* aug = app.add_subcommand("augment", "Augment the studies listed in a run config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> aug_out;
  aug->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
  aug->add_option("--seed", seed, "Override the master seed");
  aug->add_option("--workers", workers, "Parallel studies")->check(CLI::PositiveNumber);
  aug->add_option("--out", aug_out, "Override the output directory");

  auto* prev = app.add_subcommand("preview", "Write axial PGM previews of global/local gamma");
  std::string image_path, mask_path, prev_out = "preview";
  std::vector<double> gammas;
  prev->add_option("--image", image_path, "NIfTI image")->required()->check(CLI::ExistingFile);
  prev->add_option("--mask", mask_path, "Binary lesion mask")->check(CLI::ExistingFile);
  prev->add_option("--gammas", gammas, "Gamma values, e.g. 0.7,1.5")
      ->required()
      ->delimiter(',');
  prev->add_option("--out", prev_out, "Output directory");

  auto* samp = app.add_subcommand("sample-gamma", "Print gamma draws, one per line");
  std::string spec_arg, samp_out;
  std::size_t count = 1;
  std::uint64_t samp_seed = 0;
  samp->add_option("--spec", spec_arg, "Sampler JSON, or @file (default: mixture-uniform)");
  samp->add_option("-n,--n", count, "Number of draws")->check(CLI::PositiveNumber);
  samp->add_option("--seed", samp_seed, "Seed");
  samp->add_option("--out", samp_out, "Output file (default stdout)");

  auto* met = app.add_subcommand("metrics", "Image-level sensitivity/specificity");
  std::string manifest, met_out, label = "model";
  double threshold = 0.5;
  met->add_option("--manifest", manifest, "CSV: study_id,prediction_path,actual_label")
      ->required()
      ->check(CLI::ExistingFile);
  met->add_option("--threshold", threshold, "Voxel threshold (strict >)");
  met->add_option("--out", met_out, "Directory for metrics_report.{txt,csv}");
  met->add_option("--label", label, "Row label in the report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*aug) return augment(config_path, seed, workers, aug_out);
    if (*prev) return preview(image_path, mask_path, gammas, prev_out);
    if (*samp) return sample_gamma(spec_arg, count, samp_seed, samp_out);
    if (*met) return metrics(manifest, threshold, met_out, label);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
