#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lesionforge {

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t count() const noexcept { return nx * ny * nz; }
  std::size_t operator[](std::size_t axis) const noexcept {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Millimetres per voxel along each axis.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  double operator[](std::size_t axis) const noexcept {
    return axis == 0 ? sx : (axis == 1 ? sy : sz);
  }
  friend bool operator==(const Spacing&, const Spacing&) = default;
};

struct Index3 {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  std::size_t operator[](std::size_t axis) const noexcept {
    return axis == 0 ? i : (axis == 1 ? j : k);
  }
  friend bool operator==(const Index3&, const Index3&) = default;
};

/// Linear offset of voxel (i, j, k); x varies fastest.
inline std::size_t linear_index(const Dims& dims, std::size_t i, std::size_t j,
                                std::size_t k) noexcept {
  return i + dims.nx * (j + dims.ny * k);
}

/// Dense scalar field on a 3D grid. Immutable once constructed; every voxel
/// is finite. Storage is double precision in x-fastest order.
class Volume3D {
 public:
  Volume3D() = default;
  /// Throws invalid-input if any extent is zero, the data length does not
  /// match, a spacing is not strictly positive, or a value is non-finite.
  Volume3D(Dims dims, Spacing spacing, std::vector<double> data);

  /// Zero-filled volume.
  static Volume3D zeros(Dims dims, Spacing spacing = {});

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  std::span<const double> data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t n) const noexcept { return data_[n]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return data_[linear_index(dims_, i, j, k)];
  }

  /// Moves the storage out, leaving this volume empty.
  std::vector<double> release() && noexcept { return std::move(data_); }

  /// Exact equality of geometry and every voxel bit pattern.
  friend bool bit_identical(const Volume3D& a, const Volume3D& b) noexcept;

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<double> data_;
};

/// Binary field; every element is exactly 0 or 1.
class Mask3D {
 public:
  Mask3D() = default;
  /// Throws non-binary-mask naming the first element outside {0, 1}.
  Mask3D(Dims dims, std::vector<std::uint8_t> data);

  static Mask3D zeros(Dims dims);
  static Mask3D ones(Dims dims);

  const Dims& dims() const noexcept { return dims_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::uint8_t operator[](std::size_t n) const noexcept { return data_[n]; }
  std::size_t foreground_count() const noexcept;
  bool has_foreground() const noexcept;

  friend bool operator==(const Mask3D&, const Mask3D&) = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> data_;
};

/// Co-registered channels of one acquisition plus an optional lesion mask.
class Study {
 public:
  using ChannelMap = std::map<std::string, Volume3D>;

  Study() = default;
  /// Throws invalid-input when channels disagree on dims or spacing, when
  /// there are no channels, or when the mask dims differ.
  explicit Study(ChannelMap channels, std::optional<Mask3D> mask = std::nullopt);

  const ChannelMap& channels() const noexcept { return channels_; }
  const std::optional<Mask3D>& mask() const noexcept { return mask_; }
  bool has_channel(const std::string& name) const {
    return channels_.contains(name);
  }
  /// Throws invalid-input for unknown names.
  const Volume3D& channel(const std::string& name) const;
  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }

  /// Copy with one channel replaced. The replacement must share geometry.
  Study with_channel(const std::string& name, Volume3D volume) const;

  friend bool bit_identical(const Study& a, const Study& b) noexcept;

 private:
  ChannelMap channels_;
  std::optional<Mask3D> mask_;
  Dims dims_;
  Spacing spacing_;
};

/// Global extrema (m1, m2). Throws invalid-input for an empty volume.
std::pair<double, double> minmax(const Volume3D& vol);

/// Extrema of the intensities over the mask foreground. Throws
/// empty-foreground for an all-zero mask and invalid-input on dim mismatch.
std::pair<double, double> minmax_masked(const Volume3D& vol, const Mask3D& mask);

/// (1 - M) * a + M * b, realised as a per-voxel selection so both branches
/// are bit-exact.
Volume3D pointwise_mix(const Volume3D& a, const Volume3D& b, const Mask3D& mask);

/// Converts a label volume into a mask, rejecting anything but 0 and 1.
Mask3D validate_mask(const Volume3D& raw);

/// Mask as a 0/1 volume with the given spacing.
Volume3D mask_to_volume(const Mask3D& mask, Spacing spacing = {});

/// Crops every channel and the mask to [origin, origin + size).
Study extract_patch(const Study& study, Index3 origin, Dims size);

/// Single-volume variant of extract_patch.
Volume3D extract_patch(const Volume3D& vol, Index3 origin, Dims size);

}  // namespace lesionforge
