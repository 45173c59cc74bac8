#include "lesionforge/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "lesionforge/error.hpp"

namespace lesionforge {
namespace {

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << "gamma must be finite and > 0, got " << gamma;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

bool degenerate(double m1, double m2) noexcept {
  return m2 - m1 <= degenerate_range_epsilon(m2);
}

// Remaps one intensity. The clamp only absorbs last-ulp rounding so outputs
// stay inside [m1, m2].
inline double remap(double v, double m1, double m2, double gamma) noexcept {
  const double range = m2 - m1;
  const double t = (v - m1) / range;
  return std::clamp(range * std::pow(t, gamma) + m1, m1, m2);
}

void require_same_dims(const Volume3D& vol, const Mask3D& mask) {
  if (vol.dims() != mask.dims()) {
    throw Error(ErrorKind::InvalidInput, "volume and mask dims differ");
  }
}

void require_finite_field(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::InvalidParameter, std::string(field) + " must be finite");
  }
}

void require_interval(double lo, double hi, const char* lo_name, const char* hi_name) {
  require_finite_field(lo, lo_name);
  require_finite_field(hi, hi_name);
  if (!(lo < hi)) {
    throw Error(ErrorKind::InvalidParameter,
                std::string(lo_name) + " must be < " + hi_name);
  }
}

}  // namespace

double degenerate_range_epsilon(double upper) noexcept {
  return 1e-12 * std::max(1.0, std::abs(upper));
}

Volume3D gamma_global(const Volume3D& vol, double gamma) {
  require_positive_gamma(gamma);
  const auto [m1, m2] = minmax(vol);
  if (gamma == 1.0 || degenerate(m1, m2)) return vol;

  const auto in = vol.data();
  std::vector<double> out(in.size());
  std::transform(in.begin(), in.end(), out.begin(),
                 [&](double v) { return remap(v, m1, m2, gamma); });
  return Volume3D(vol.dims(), vol.spacing(), std::move(out));
}

Volume3D gamma_foreground_normalized(const Volume3D& vol, const Mask3D& mask,
                                     double gamma) {
  require_positive_gamma(gamma);
  require_same_dims(vol, mask);
  const auto [m1, m2] = minmax_masked(vol, mask);
  if (gamma == 1.0 || degenerate(m1, m2)) return vol;

  // Background intensities may fall outside [m1, m2], where the power of a
  // negative base is undefined; they are never read by the mixing step.
  const auto in = vol.data();
  const auto bits = mask.data();
  std::vector<double> out(in.begin(), in.end());
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (bits[n]) out[n] = remap(in[n], m1, m2, gamma);
  }
  return Volume3D(vol.dims(), vol.spacing(), std::move(out));
}

Volume3D gamma_local(const Volume3D& vol, const Mask3D& mask, double gamma,
                     EmptyMaskPolicy policy) {
  require_positive_gamma(gamma);
  require_same_dims(vol, mask);
  if (!mask.has_foreground()) {
    if (policy == EmptyMaskPolicy::Error) {
      throw Error(ErrorKind::EmptyForeground, "local gamma needs a non-empty mask");
    }
    return gamma_global(vol, gamma);
  }
  const Volume3D transformed = gamma_foreground_normalized(vol, mask, gamma);
  return pointwise_mix(vol, transformed, mask);
}

std::string_view to_string(GammaKind kind) noexcept {
  switch (kind) {
    case GammaKind::Compression: return "compression";
    case GammaKind::Identity: return "identity";
    case GammaKind::Expansion: return "expansion";
  }
  return "unknown";
}

GammaKind classify_gamma(double gamma) {
  require_positive_gamma(gamma);
  if (gamma < 1.0) return GammaKind::Compression;
  if (gamma > 1.0) return GammaKind::Expansion;
  return GammaKind::Identity;
}

void validate(const GammaSamplerSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MixtureUniform>) {
          require_interval(s.lo1, s.hi1, "lo1", "hi1");
          require_interval(s.lo2, s.hi2, "lo2", "hi2");
          if (!(s.lo1 > 0.0)) throw Error(ErrorKind::InvalidParameter, "lo1 must be > 0");
          if (!(s.lo2 > 0.0)) throw Error(ErrorKind::InvalidParameter, "lo2 must be > 0");
          if (!(s.p >= 0.0 && s.p <= 1.0)) {
            throw Error(ErrorKind::InvalidParameter, "p must lie in [0, 1]");
          }
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          require_finite_field(s.mu, "mu");
          require_finite_field(s.sigma, "sigma");
          if (!(s.sigma > 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma must be > 0");
        } else {
          require_finite_field(s.alpha, "alpha");
          require_finite_field(s.beta, "beta");
          if (!(s.alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "alpha must be > 0");
          if (!(s.beta > 0.0)) throw Error(ErrorKind::InvalidParameter, "beta must be > 0");
          require_interval(s.lo, s.hi, "lo", "hi");
          if (!(s.lo > 0.0)) throw Error(ErrorKind::InvalidParameter, "lo must be > 0");
        }
      },
      spec);
}

GammaSampler::GammaSampler(GammaSamplerSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), stream_(seed) {
  validate(spec_);
}

double GammaSampler::sample() {
  return std::visit(
      [this](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MixtureUniform>) {
          const bool first = stream_.uniform() < s.p;
          const double u = stream_.uniform();
          return first ? s.lo1 + (s.hi1 - s.lo1) * u : s.lo2 + (s.hi2 - s.lo2) * u;
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          return std::exp(s.mu + s.sigma * stream_.normal());
        } else {
          const double x = boost::math::ibeta_inv(s.alpha, s.beta, stream_.uniform());
          return s.lo + (s.hi - s.lo) * x;
        }
      },
      spec_);
}

GammaSampler make_sampler(const GammaSamplerSpec& spec, std::uint64_t seed) {
  return GammaSampler(spec, seed);
}

}  // namespace lesionforge
