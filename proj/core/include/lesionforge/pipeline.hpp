#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lesionforge/gamma.hpp"
#include "lesionforge/volume.hpp"

namespace lesionforge {

/// Closed parameter range sampled uniformly.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

// Parameter blocks, one per augmentation kind. An empty `channels` list
// targets every channel, except for local gamma where it targets the DWI
// channels (see is_dwi_channel).

struct LocalGammaOp {
  GammaSamplerSpec sampler = MixtureUniform{};
  std::vector<std::string> channels;
  bool per_channel = false;  // one gamma per study unless set
  EmptyMaskPolicy empty_mask = EmptyMaskPolicy::TreatAsGlobal;
  friend bool operator==(const LocalGammaOp&, const LocalGammaOp&) = default;
};

struct GlobalGammaOp {
  GammaSamplerSpec sampler = MixtureUniform{};
  std::vector<std::string> channels;
  bool per_channel = false;
  friend bool operator==(const GlobalGammaOp&, const GlobalGammaOp&) = default;
};

/// sigma is a fraction of each channel's intensity SD when `relative`.
struct GaussianNoiseOp {
  Range sigma{0.0, 0.1};
  bool relative = true;
  std::vector<std::string> channels;
  friend bool operator==(const GaussianNoiseOp&, const GaussianNoiseOp&) = default;
};

struct RicianNoiseOp {
  Range sigma{0.0, 0.1};
  bool relative = true;
  std::vector<std::string> channels;
  friend bool operator==(const RicianNoiseOp&, const RicianNoiseOp&) = default;
};

struct GaussianBlurOp {
  Range sigma_mm{0.5, 1.5};
  std::vector<std::string> channels;
  friend bool operator==(const GaussianBlurOp&, const GaussianBlurOp&) = default;
};

/// shift is a fraction of each channel's intensity range when `relative`.
struct BrightnessOp {
  Range shift{-0.1, 0.1};
  Range scale{0.9, 1.1};
  bool relative = true;
  std::vector<std::string> channels;
  friend bool operator==(const BrightnessOp&, const BrightnessOp&) = default;
};

struct ContrastOp {
  Range factor{0.75, 1.25};
  std::vector<std::string> channels;
  friend bool operator==(const ContrastOp&, const ContrastOp&) = default;
};

struct MirrorOp {
  std::vector<int> axes{0, 1, 2};
  friend bool operator==(const MirrorOp&, const MirrorOp&) = default;
};

struct RandomPatchOp {
  Dims size{128, 128, 128};
  friend bool operator==(const RandomPatchOp&, const RandomPatchOp&) = default;
};

using OpParams = std::variant<LocalGammaOp, GlobalGammaOp, GaussianNoiseOp,
                              RicianNoiseOp, GaussianBlurOp, BrightnessOp,
                              ContrastOp, MirrorOp, RandomPatchOp>;

struct AugmentOpSpec {
  OpParams params;
  double probability = 0.15;
  friend bool operator==(const AugmentOpSpec&, const AugmentOpSpec&) = default;
};

/// Config name of the op kind, e.g. "local-gamma".
std::string_view kind_name(const OpParams& params) noexcept;

/// Default spec for a named kind: probability 1.0 for local gamma, 0.15 for
/// everything else. Throws config for unknown names.
AugmentOpSpec default_op(std::string_view kind);

struct PipelineConfig {
  std::vector<AugmentOpSpec> ops;
  std::uint64_t seed = 0;
  std::size_t samples_per_study = 1;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Checks probabilities, ranges, samplers, axes and patch sizes. Throws
/// config naming the op position and field.
void validate(const PipelineConfig& config);

/// b0, b<digits>, adc, dwi and names starting with "dwi", case-insensitive.
bool is_dwi_channel(std::string_view name);

/// What one op did for one sample.
struct OpRecord {
  std::size_t position = 0;
  std::string kind;
  bool fired = false;
  std::uint64_t seed = 0;
  std::map<std::string, double> values;
  std::vector<std::string> notes;
};

struct AugmentResult {
  Study study;
  std::vector<OpRecord> trace;
};

/// Seed of the stream that drives op `position` for `sample_index`.
std::uint64_t op_seed(std::uint64_t master_seed, std::uint64_t sample_index,
                      std::size_t position) noexcept;

/// Runs the ops in order. Each op first draws its firing decision from its
/// own stream, then its parameters. The mask is never intensity-augmented
/// and follows every crop and flip.
AugmentResult apply_pipeline_traced(const Study& study, const PipelineConfig& config,
                                    std::uint64_t sample_index);

Study apply_pipeline(const Study& study, const PipelineConfig& config,
                     std::uint64_t sample_index);

}  // namespace lesionforge
