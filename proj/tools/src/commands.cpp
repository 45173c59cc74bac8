#include "lesionforge/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lesionforge/cli/manifest.hpp"
#include "lesionforge/error.hpp"
#include "lesionforge/nifti.hpp"
#include "lesionforge/pipeline.hpp"
#include "lesionforge/pipeline_config.hpp"
#include "lesionforge/random.hpp"

namespace lesionforge::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

bool has_local_gamma(const PipelineConfig& config) {
  return std::any_of(config.ops.begin(), config.ops.end(), [](const AugmentOpSpec& op) {
    return std::holds_alternative<LocalGammaOp>(op.params);
  });
}

struct LoadedStudy {
  Study study;
  std::optional<nifti::NiftiHeader> header;
  bool mask_substituted = false;
};

LoadedStudy load_study(const StudyRow& row, const PipelineConfig& config) {
  if (row.channels.empty()) {
    throw Error(ErrorKind::Config, "manifest row lists no channels");
  }
  LoadedStudy loaded;
  Study::ChannelMap channels;
  for (const auto& [name, path] : row.channels) {
    auto [vol, header] = nifti::read_volume(path);
    if (!loaded.header) loaded.header = header;
    channels.emplace(name, std::move(vol));
  }
  std::optional<Mask3D> mask;
  if (row.mask) {
    auto [raw, header] = nifti::read_volume(*row.mask);
    try {
      mask = validate_mask(raw);
    } catch (const Error& e) {
      throw Error(e.kind(), row.mask->string() + ": " + e.detail());
    }
  } else if (has_local_gamma(config)) {
    // No lesion annotation: an all-zero mask makes local gamma fall back to
    // the whole-image transform.
    mask = Mask3D::zeros(channels.begin()->second.dims());
    loaded.mask_substituted = true;
  }
  loaded.study = Study(std::move(channels), std::move(mask));
  return loaded;
}

json trace_to_json(const std::vector<OpRecord>& trace) {
  json ops = json::array();
  for (const auto& r : trace) {
    json values = json::object();
    for (const auto& [k, v] : r.values) values[k] = v;
    ops.push_back(json{{"position", r.position},
                       {"kind", r.kind},
                       {"fired", r.fired},
                       {"seed", r.seed},
                       {"values", std::move(values)},
                       {"notes", r.notes}});
  }
  return ops;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<fs::path> augment_one(const StudyRow& row, const RunConfig& run,
                                  const fs::path& out_dir) {
  const auto loaded = load_study(row, run.pipeline);
  PipelineConfig config = run.pipeline;
  config.seed = study_seed(run.seed, row.study_id);

  std::vector<fs::path> written;
  for (std::size_t k = 0; k < config.samples_per_study; ++k) {
    auto result = apply_pipeline_traced(loaded.study, config, k);
    const std::string stem = row.study_id + "_aug" + std::to_string(k);
    const nifti::NiftiHeader* like = loaded.header ? &*loaded.header : nullptr;
    for (const auto& [name, vol] : result.study.channels()) {
      const auto path = out_dir / (stem + "_" + name + ".nii.gz");
      nifti::write_volume(vol, path, run.output_datatype, like, run.gzip_level);
      written.push_back(path);
    }
    if (result.study.mask() && !loaded.mask_substituted) {
      const auto path = out_dir / (stem + "_mask.nii.gz");
      nifti::write_volume(mask_to_volume(*result.study.mask(), result.study.spacing()), path,
                          nifti::OutputDatatype::Float32, like, run.gzip_level);
      written.push_back(path);
    }

    json notes = json::array();
    if (loaded.mask_substituted) {
      notes.push_back("no lesion mask in manifest: local gamma applied as global gamma");
    }
    const json sidecar{
        {"schema_version", kSchemaVersion},
        {"study_id", row.study_id},
        {"sample_index", k},
        {"master_seed", run.seed},
        {"study_seed", config.seed},
        {"mask", !row.mask ? "absent" : "present"},
        {"notes", std::move(notes)},
        {"dims", json::array({result.study.dims().nx, result.study.dims().ny,
                              result.study.dims().nz})},
        {"ops", trace_to_json(result.trace)},
    };
    const auto sidecar_path = out_dir / (stem + ".json");
    write_text(sidecar_path, sidecar.dump(2) + "\n");
    written.push_back(sidecar_path);
  }
  return written;
}

}  // namespace

std::uint64_t study_seed(std::uint64_t master_seed, const std::string& study_id) noexcept {
  return derive_seed(master_seed, stable_hash(study_id));
}

AugmentSummary run_augment(const RunConfig& config, const fs::path& base_dir) {
  validate(config.pipeline);
  const fs::path manifest = base_dir / config.manifest;
  const fs::path out_dir = base_dir / config.output_dir;
  const auto rows = parse_study_manifest(manifest);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::Io, "cannot create '" + out_dir.string() + "': " + ec.message());
  }

  struct Outcome {
    bool ok = false;
    std::string diagnostic;
    std::vector<fs::path> written;
  };
  std::vector<Outcome> outcomes(rows.size());
  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      Outcome outcome;
      try {
        outcome.written = augment_one(rows[i], config, out_dir);
        outcome.ok = true;
      } catch (const std::exception& e) {
        outcome.diagnostic = rows[i].study_id + ": " + e.what();
      }
      std::lock_guard lock(log_mutex);
      if (outcome.ok) {
        spdlog::info("augmented {} ({} files)", rows[i].study_id, outcome.written.size());
      } else {
        spdlog::error("{}", outcome.diagnostic);
      }
      outcomes[i] = std::move(outcome);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, rows.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  AugmentSummary summary;
  for (auto& o : outcomes) {
    if (o.ok) {
      ++summary.studies_ok;
      summary.written.insert(summary.written.end(), o.written.begin(), o.written.end());
    } else {
      ++summary.studies_failed;
      summary.diagnostics.push_back(std::move(o.diagnostic));
    }
  }
  return summary;
}

std::size_t preview_slice(const Mask3D& mask) {
  const Dims& d = mask.dims();
  std::size_t zmin = d.nz;
  std::size_t zmax = 0;
  for (std::size_t k = 0; k < d.nz; ++k) {
    const auto* plane = mask.data().data() + linear_index(d, 0, 0, k);
    if (std::find(plane, plane + d.nx * d.ny, 1) != plane + d.nx * d.ny) {
      zmin = std::min(zmin, k);
      zmax = std::max(zmax, k);
    }
  }
  if (zmin > zmax) return d.nz / 2;
  return (zmin + zmax) / 2;
}

void write_pgm(const fs::path& path, const Volume3D& vol, std::size_t z, double lo,
               double hi) {
  const Dims& d = vol.dims();
  if (z >= d.nz) throw Error(ErrorKind::InvalidInput, "slice index outside the volume");
  std::string bytes = "P5\n" + std::to_string(d.nx) + " " + std::to_string(d.ny) + "\n255\n";
  const double width = hi - lo;
  for (std::size_t j = 0; j < d.ny; ++j) {
    for (std::size_t i = 0; i < d.nx; ++i) {
      double level = 0.0;
      if (width > 0.0) level = std::clamp((vol.at(i, j, z) - lo) / width, 0.0, 1.0) * 255.0;
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(level))));
    }
  }
  write_text(path, bytes);
}

PreviewResult run_preview(const Volume3D& image, const Mask3D& mask,
                          std::span<const double> gammas, const fs::path& out_dir) {
  if (image.dims() != mask.dims()) {
    throw Error(ErrorKind::InvalidInput, "image and mask dims differ");
  }
  for (double g : gammas) {
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidParameter, "preview gammas must be > 0");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + out_dir.string() + "'");

  PreviewResult result;
  result.mask_empty = !mask.has_foreground();
  result.slice = preview_slice(mask);

  double lo = image.at(0, 0, result.slice);
  double hi = lo;
  for (std::size_t j = 0; j < image.dims().ny; ++j) {
    for (std::size_t i = 0; i < image.dims().nx; ++i) {
      lo = std::min(lo, image.at(i, j, result.slice));
      hi = std::max(hi, image.at(i, j, result.slice));
    }
  }

  const auto emit = [&](const std::string& name, const Volume3D& vol) {
    const auto path = out_dir / name;
    write_pgm(path, vol, result.slice, lo, hi);
    result.images.push_back(path);
  };
  emit("original.pgm", image);
  for (double g : gammas) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%g", g);
    emit(std::string("global_gamma_") + tag + ".pgm", gamma_global(image, g));
    emit(std::string("local_gamma_") + tag + ".pgm", gamma_local(image, mask, g));
  }
  return result;
}

std::vector<double> sample_gammas(const GammaSamplerSpec& spec, std::size_t n,
                                  std::uint64_t seed) {
  auto sampler = make_sampler(spec, seed);
  std::vector<double> out(n);
  for (double& g : out) g = sampler.sample();
  return out;
}

void write_gammas(std::ostream& out, std::span<const double> values) {
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

MetricsReport run_metrics(const fs::path& manifest, double threshold) {
  const auto rows = parse_metrics_manifest(manifest);
  MetricsReport report;
  for (const auto& row : rows) {
    try {
      const auto [prediction, header] = nifti::read_volume(row.prediction);
      report.outcomes.push_back(
          {row.study_id, image_level_positive(prediction, threshold), row.actual});
    } catch (const Error& e) {
      report.failures.push_back(row.study_id + ": " + e.what());
    }
  }
  report.counts = confusion(report.outcomes);
  return report;
}

std::string render_metrics_table(const std::string& label, const ConfusionCounts& counts) {
  const std::string sens = format_metric(sensitivity(counts));
  const std::string spec = format_metric(specificity(counts));
  char buf[256];
  std::ostringstream os;
  std::snprintf(buf, sizeof buf, "%-16s | %-11s | %-11s\n", "", "Sensitivity", "Specificity");
  os << buf;
  os << std::string(16, '-') << "-+-" << std::string(11, '-') << "-+-"
     << std::string(11, '-') << "\n";
  std::snprintf(buf, sizeof buf, "%-16s | %-11s | %-11s\n", label.c_str(), sens.c_str(),
                spec.c_str());
  os << buf;
  std::snprintf(buf, sizeof buf, "(n=%zu: tp=%zu fp=%zu tn=%zu fn=%zu)\n", counts.total(),
                counts.tp, counts.fp, counts.tn, counts.fn);
  os << buf;
  return os.str();
}

std::string render_metrics_csv(const std::string& label, const ConfusionCounts& counts) {
  std::ostringstream os;
  os << "label,n,tp,fp,tn,fn,sensitivity,specificity\n"
     << label << ',' << counts.total() << ',' << counts.tp << ',' << counts.fp << ','
     << counts.tn << ',' << counts.fn << ',' << format_metric(sensitivity(counts), 6) << ','
     << format_metric(specificity(counts), 6) << '\n';
  return os.str();
}

}  // namespace lesionforge::cli
