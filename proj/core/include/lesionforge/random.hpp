#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>

namespace lesionforge {

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent child seed from (seed, key). Order-sensitive.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept;

/// 64-bit FNV-1a of the bytes of `text`; stable across platforms.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Reproducible random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; all conversions to real values are
/// done here rather than by <random> distributions, whose algorithms are
/// implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits; one engine draw.
  double uniform();
  /// Uniform on [lo, hi); one engine draw.
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller. Draws come in pairs; the second value of
  /// each pair is returned by the following call.
  double normal();
  /// Fills `out` with N(0, sigma^2) samples.
  void fill_normal(std::span<double> out, double sigma);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace lesionforge
