#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lesionforge/volume.hpp"

namespace lesionforge::testkit {

/// Random dims with every extent in [1, max_extent].
inline Dims random_dims(std::mt19937_64& rng, std::size_t max_extent) {
  std::uniform_int_distribution<std::size_t> extent(1, max_extent);
  return {extent(rng), extent(rng), extent(rng)};
}

inline Spacing random_spacing(std::mt19937_64& rng) {
  std::uniform_real_distribution<float> s(0.25f, 4.0f);
  // float-representable so pixdim round-trips exactly
  return {static_cast<double>(s(rng)), static_cast<double>(s(rng)),
          static_cast<double>(s(rng))};
}

/// Intensities uniform in [offset, offset + scale) with random offset and
/// scale, so ranges are not always [0, 1].
inline Volume3D random_volume(std::mt19937_64& rng, Dims dims, Spacing spacing = {}) {
  std::uniform_real_distribution<double> offset_dist(-500.0, 500.0);
  std::uniform_real_distribution<double> log_scale(-2.0, 4.0);
  const double offset = offset_dist(rng);
  const double scale = std::pow(10.0, log_scale(rng));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> data(dims.count());
  for (double& v : data) v = offset + scale * u(rng);
  return Volume3D(dims, spacing, std::move(data));
}

/// Random mask with roughly `fraction` foreground; forces at least one
/// foreground voxel when `nonempty`.
inline Mask3D random_mask(std::mt19937_64& rng, Dims dims, double fraction, bool nonempty) {
  std::bernoulli_distribution fg(fraction);
  std::vector<std::uint8_t> bits(dims.count());
  for (auto& b : bits) b = fg(rng) ? 1 : 0;
  if (nonempty) {
    std::uniform_int_distribution<std::size_t> pick(0, bits.size() - 1);
    bits[pick(rng)] = 1;
  }
  return Mask3D(dims, std::move(bits));
}

/// Blob-shaped mask: voxels within `radius` of a random centre. A
/// non-positive radius picks a quarter of the smallest extent.
inline Mask3D random_blob_mask(std::mt19937_64& rng, Dims dims, double radius = 0.0) {
  if (radius <= 0.0) {
    radius = 1.0 + static_cast<double>(std::min({dims.nx, dims.ny, dims.nz})) / 4.0;
  }
  std::uniform_real_distribution<double> cx(0.0, static_cast<double>(dims.nx));
  std::uniform_real_distribution<double> cy(0.0, static_cast<double>(dims.ny));
  std::uniform_real_distribution<double> cz(0.0, static_cast<double>(dims.nz));
  const double x0 = cx(rng), y0 = cy(rng), z0 = cz(rng);
  std::vector<std::uint8_t> bits(dims.count());
  for (std::size_t k = 0; k < dims.nz; ++k)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t i = 0; i < dims.nx; ++i) {
        const double dx = i - x0, dy = j - y0, dz = k - z0;
        bits[linear_index(dims, i, j, k)] = dx * dx + dy * dy + dz * dz <= radius * radius;
      }
  bits[linear_index(dims, static_cast<std::size_t>(x0), static_cast<std::size_t>(y0),
                    static_cast<std::size_t>(z0))] = 1;
  return Mask3D(dims, std::move(bits));
}

}  // namespace lesionforge::testkit
