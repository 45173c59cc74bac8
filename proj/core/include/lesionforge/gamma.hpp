#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "lesionforge/random.hpp"
#include "lesionforge/volume.hpp"

namespace lesionforge {

/// Below this width an intensity range is treated as constant and left alone.
double degenerate_range_epsilon(double upper) noexcept;

/// Min-max-conjugated gamma over the whole volume:
///   (m2 - m1) * ((I - m1) / (m2 - m1))^gamma + m1.
/// gamma == 1 and constant volumes return an exact copy. Throws
/// invalid-parameter unless gamma > 0.
Volume3D gamma_global(const Volume3D& vol, double gamma);

/// Same map with m1, m2 taken over the mask foreground and evaluated only
/// there; background voxels are copied through.
Volume3D gamma_foreground_normalized(const Volume3D& vol, const Mask3D& mask,
                                     double gamma);

enum class EmptyMaskPolicy {
  TreatAsGlobal,  // replace an all-zero mask by all-ones
  Error,
};

/// Local gamma augmentation: the foreground-normalized transform mixed back
/// through the mask, (1 - M) * I + M * I_gamma. Background voxels are
/// bit-identical to the input. With an all-zero mask the default policy
/// yields gamma_global(vol, gamma).
Volume3D gamma_local(const Volume3D& vol, const Mask3D& mask, double gamma,
                     EmptyMaskPolicy policy = EmptyMaskPolicy::TreatAsGlobal);

enum class GammaKind { Compression, Identity, Expansion };

std::string_view to_string(GammaKind kind) noexcept;

/// Compression for gamma < 1 (brightens), expansion for gamma > 1.
GammaKind classify_gamma(double gamma);

// ---------------------------------------------------------------------------
// Parameter distributions

/// p * U(lo1, hi1) + (1 - p) * U(lo2, hi2).
struct MixtureUniform {
  double lo1 = 0.7;
  double hi1 = 1.0;
  double lo2 = 1.0;
  double hi2 = 1.5;
  double p = 0.5;
  friend bool operator==(const MixtureUniform&, const MixtureUniform&) = default;
};

/// exp(N(mu, sigma^2)).
struct LogNormal {
  double mu = 0.0;
  double sigma = 0.1;
  friend bool operator==(const LogNormal&, const LogNormal&) = default;
};

/// lo + (hi - lo) * Beta(alpha, beta).
struct BetaOnInterval {
  double alpha = 2.0;
  double beta = 2.0;
  double lo = 0.7;
  double hi = 1.5;
  friend bool operator==(const BetaOnInterval&, const BetaOnInterval&) = default;
};

using GammaSamplerSpec = std::variant<MixtureUniform, LogNormal, BetaOnInterval>;

/// Throws invalid-parameter naming the offending field.
void validate(const GammaSamplerSpec& spec);

class GammaSampler {
 public:
  /// Validates `spec`; see make_sampler.
  GammaSampler(GammaSamplerSpec spec, std::uint64_t seed);

  /// One draw. Mixture: two stream draws (interval choice, then position).
  /// Log-normal: one normal variate. Beta: one uniform through the inverse
  /// regularized incomplete beta function.
  double sample();

  const GammaSamplerSpec& spec() const noexcept { return spec_; }

 private:
  GammaSamplerSpec spec_;
  RandomStream stream_;
};

GammaSampler make_sampler(const GammaSamplerSpec& spec, std::uint64_t seed);

inline double sample_gamma(GammaSampler& sampler) { return sampler.sample(); }

}  // namespace lesionforge
