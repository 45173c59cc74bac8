#include "lesionforge/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "lesionforge/augment.hpp"
#include "lesionforge/error.hpp"

namespace lesionforge {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void config_error(std::size_t position, std::string_view kind,
                               const std::string& what) {
  std::ostringstream os;
  os << "op " << position << " (" << kind << "): " << what;
  throw Error(ErrorKind::Config, os.str());
}

void check_range(std::size_t position, std::string_view kind, const Range& r,
                 const char* field, bool non_negative) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    config_error(position, kind, std::string(field) + " must be a finite range with lo <= hi");
  }
  if (non_negative && r.lo < 0.0) {
    config_error(position, kind, std::string(field) + " must be >= 0");
  }
}

double draw(RandomStream& stream, const Range& r) {
  return r.lo == r.hi ? r.lo : stream.uniform(r.lo, r.hi);
}

std::vector<std::string> resolve_channels(const Study& study,
                                          const std::vector<std::string>& requested,
                                          std::size_t position, std::string_view kind,
                                          bool dwi_default) {
  std::vector<std::string> names;
  if (requested.empty()) {
    for (const auto& [name, vol] : study.channels()) {
      if (!dwi_default || is_dwi_channel(name)) names.push_back(name);
    }
    if (names.empty()) {
      config_error(position, kind,
                   "study has no DWI channel; list target channels explicitly");
    }
    return names;
  }
  for (const auto& name : requested) {
    if (!study.has_channel(name)) {
      config_error(position, kind, "channel '" + name + "' is not in the study");
    }
    names.push_back(name);
  }
  return names;
}

// Applies `fn` to every listed channel, drawing each channel's noise from its
// own stream so channel order does not couple the fields.
template <typename Fn>
Study map_channels(const Study& study, const std::vector<std::string>& names, Fn&& fn) {
  Study::ChannelMap channels = study.channels();
  for (const auto& name : names) {
    auto it = channels.find(name);
    it->second = fn(name, it->second);
  }
  return Study(std::move(channels), study.mask());
}

}  // namespace

std::string_view kind_name(const OpParams& params) noexcept {
  return std::visit(
      overloaded{
          [](const LocalGammaOp&) { return std::string_view("local-gamma"); },
          [](const GlobalGammaOp&) { return std::string_view("global-gamma"); },
          [](const GaussianNoiseOp&) { return std::string_view("gaussian-noise"); },
          [](const RicianNoiseOp&) { return std::string_view("rician-noise"); },
          [](const GaussianBlurOp&) { return std::string_view("gaussian-blur"); },
          [](const BrightnessOp&) { return std::string_view("brightness"); },
          [](const ContrastOp&) { return std::string_view("contrast"); },
          [](const MirrorOp&) { return std::string_view("mirror"); },
          [](const RandomPatchOp&) { return std::string_view("random-patch"); },
      },
      params);
}

AugmentOpSpec default_op(std::string_view kind) {
  if (kind == "local-gamma") return {LocalGammaOp{}, 1.0};
  if (kind == "global-gamma") return {GlobalGammaOp{}, 0.15};
  if (kind == "gaussian-noise") return {GaussianNoiseOp{}, 0.15};
  if (kind == "rician-noise") return {RicianNoiseOp{}, 0.15};
  if (kind == "gaussian-blur") return {GaussianBlurOp{}, 0.15};
  if (kind == "brightness") return {BrightnessOp{}, 0.15};
  if (kind == "contrast") return {ContrastOp{}, 0.15};
  if (kind == "mirror") return {MirrorOp{}, 0.15};
  if (kind == "random-patch") return {RandomPatchOp{}, 0.15};
  throw Error(ErrorKind::Config, "unknown op kind '" + std::string(kind) + "'");
}

bool is_dwi_channel(std::string_view name) {
  const std::string n = lower(name);
  if (n == "adc" || n.starts_with("dwi")) return true;
  if (n.size() >= 2 && n[0] == 'b' &&
      std::all_of(n.begin() + 1, n.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return true;
  }
  return false;
}

void validate(const PipelineConfig& config) {
  if (config.samples_per_study == 0) {
    throw Error(ErrorKind::Config, "samples_per_study must be positive");
  }
  for (std::size_t pos = 0; pos < config.ops.size(); ++pos) {
    const auto& op = config.ops[pos];
    const auto kind = kind_name(op.params);
    if (!(op.probability >= 0.0 && op.probability <= 1.0)) {
      config_error(pos, kind, "probability must lie in [0, 1]");
    }
    const auto check_sampler = [&](const GammaSamplerSpec& spec) {
      try {
        validate(spec);
      } catch (const Error& e) {
        config_error(pos, kind, "sampler " + e.detail());
      }
    };
    std::visit(
        overloaded{
            [&](const LocalGammaOp& p) { check_sampler(p.sampler); },
            [&](const GlobalGammaOp& p) { check_sampler(p.sampler); },
            [&](const GaussianNoiseOp& p) { check_range(pos, kind, p.sigma, "sigma", true); },
            [&](const RicianNoiseOp& p) { check_range(pos, kind, p.sigma, "sigma", true); },
            [&](const GaussianBlurOp& p) {
              check_range(pos, kind, p.sigma_mm, "sigma_mm", true);
            },
            [&](const BrightnessOp& p) {
              check_range(pos, kind, p.shift, "shift", false);
              check_range(pos, kind, p.scale, "scale", false);
            },
            [&](const ContrastOp& p) { check_range(pos, kind, p.factor, "factor", false); },
            [&](const MirrorOp& p) {
              for (int axis : p.axes) {
                if (axis < 0 || axis > 2) config_error(pos, kind, "axes must be 0, 1 or 2");
              }
            },
            [&](const RandomPatchOp& p) {
              if (p.size.count() == 0) config_error(pos, kind, "patch size must be positive");
            },
        },
        op.params);
  }
}

std::uint64_t op_seed(std::uint64_t master_seed, std::uint64_t sample_index,
                      std::size_t position) noexcept {
  return derive_seed(derive_seed(master_seed, sample_index), position);
}

AugmentResult apply_pipeline_traced(const Study& study, const PipelineConfig& config,
                                    std::uint64_t sample_index) {
  validate(config);
  AugmentResult result{study, {}};
  Study& current = result.study;

  for (std::size_t pos = 0; pos < config.ops.size(); ++pos) {
    const auto& op = config.ops[pos];
    const auto kind = kind_name(op.params);
    OpRecord record;
    record.position = pos;
    record.kind = std::string(kind);
    record.seed = op_seed(config.seed, sample_index, pos);

    RandomStream stream(record.seed);
    record.fired = stream.uniform() < op.probability;
    if (!record.fired) {
      result.trace.push_back(std::move(record));
      continue;
    }

    const auto channel_stream = [&](const std::string& name) {
      return RandomStream(derive_seed(record.seed, stable_hash(name)));
    };

    std::visit(
        overloaded{
            [&](const LocalGammaOp& p) {
              if (!current.mask()) {
                config_error(pos, kind, "study has no lesion mask");
              }
              const auto names = resolve_channels(current, p.channels, pos, kind, true);
              if (!current.mask()->has_foreground()) {
                record.notes.push_back(p.empty_mask == EmptyMaskPolicy::TreatAsGlobal
                                           ? "empty mask: applied as global gamma"
                                           : "empty mask");
              }
              GammaSampler sampler(p.sampler, stream.next());
              const double shared = p.per_channel ? 0.0 : sampler.sample();
              if (!p.per_channel) record.values["gamma"] = shared;
              const Mask3D& mask = *current.mask();
              current = map_channels(current, names, [&](const std::string& name,
                                                         const Volume3D& vol) {
                const double g = p.per_channel ? sampler.sample() : shared;
                if (p.per_channel) record.values["gamma[" + name + "]"] = g;
                return gamma_local(vol, mask, g, p.empty_mask);
              });
            },
            [&](const GlobalGammaOp& p) {
              const auto names = resolve_channels(current, p.channels, pos, kind, false);
              GammaSampler sampler(p.sampler, stream.next());
              const double shared = p.per_channel ? 0.0 : sampler.sample();
              if (!p.per_channel) record.values["gamma"] = shared;
              current = map_channels(current, names, [&](const std::string& name,
                                                         const Volume3D& vol) {
                const double g = p.per_channel ? sampler.sample() : shared;
                if (p.per_channel) record.values["gamma[" + name + "]"] = g;
                return gamma_global(vol, g);
              });
            },
            [&](const GaussianNoiseOp& p) {
              const auto names = resolve_channels(current, p.channels, pos, kind, false);
              const double sigma = draw(stream, p.sigma);
              record.values["sigma"] = sigma;
              current = map_channels(current, names, [&](const std::string& name,
                                                         const Volume3D& vol) {
                const double s = p.relative ? sigma * intensity_sd(vol) : sigma;
                record.values["sigma_abs[" + name + "]"] = s;
                auto noise = channel_stream(name);
                return op_gaussian_noise(vol, s, noise);
              });
            },
            [&](const RicianNoiseOp& p) {
              const auto names = resolve_channels(current, p.channels, pos, kind, false);
              const double sigma = draw(stream, p.sigma);
              record.values["sigma"] = sigma;
              current = map_channels(current, names, [&](const std::string& name,
                                                         const Volume3D& vol) {
                const double s = p.relative ? sigma * intensity_sd(vol) : sigma;
                record.values["sigma_abs[" + name + "]"] = s;
                auto noise = channel_stream(name);
                return op_rician_noise(vol, s, noise);
              });
            },
            [&](const GaussianBlurOp& p) {
              const auto names = resolve_channels(current, p.channels, pos, kind, false);
              const double sigma_mm = draw(stream, p.sigma_mm);
              record.values["sigma_mm"] = sigma_mm;
              current = map_channels(current, names,
                                     [&](const std::string&, const Volume3D& vol) {
                                       return op_gaussian_blur(vol, sigma_mm);
                                     });
            },
            [&](const BrightnessOp& p) {
              const auto names = resolve_channels(current, p.channels, pos, kind, false);
              const double shift = draw(stream, p.shift);
              const double scale = draw(stream, p.scale);
              record.values["shift"] = shift;
              record.values["scale"] = scale;
              current = map_channels(current, names, [&](const std::string& name,
                                                         const Volume3D& vol) {
                double s = shift;
                if (p.relative) {
                  const auto [m1, m2] = minmax(vol);
                  s = shift * (m2 - m1);
                }
                record.values["shift_abs[" + name + "]"] = s;
                return op_brightness(vol, s, scale);
              });
            },
            [&](const ContrastOp& p) {
              const auto names = resolve_channels(current, p.channels, pos, kind, false);
              const double factor = draw(stream, p.factor);
              record.values["factor"] = factor;
              current = map_channels(current, names,
                                     [&](const std::string&, const Volume3D& vol) {
                                       return op_contrast(vol, factor);
                                     });
            },
            [&](const MirrorOp& p) {
              std::vector<int> flipped;
              current = op_mirror(current, p.axes, stream, &flipped);
              for (int axis : p.axes) {
                const bool hit = std::find(flipped.begin(), flipped.end(), axis) != flipped.end();
                record.values["flip_axis" + std::to_string(axis)] = hit ? 1.0 : 0.0;
              }
            },
            [&](const RandomPatchOp& p) {
              Index3 origin;
              try {
                current = op_random_patch(current, p.size, stream, &origin);
              } catch (const Error& e) {
                config_error(pos, kind, e.detail());
              }
              record.values["origin_i"] = static_cast<double>(origin.i);
              record.values["origin_j"] = static_cast<double>(origin.j);
              record.values["origin_k"] = static_cast<double>(origin.k);
            },
        },
        op.params);
    result.trace.push_back(std::move(record));
  }
  return result;
}

Study apply_pipeline(const Study& study, const PipelineConfig& config,
                     std::uint64_t sample_index) {
  return apply_pipeline_traced(study, config, sample_index).study;
}

}  // namespace lesionforge
