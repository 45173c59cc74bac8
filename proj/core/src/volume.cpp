#include "lesionforge/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "lesionforge/error.hpp"

namespace lesionforge {
namespace {

std::string describe(const Dims& d) {
  std::ostringstream os;
  os << d.nx << "x" << d.ny << "x" << d.nz;
  return os.str();
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": dims " +
                                             describe(a) + " vs " + describe(b));
  }
}

Mask3D filled_mask(Dims dims, std::uint8_t value) {
  return Mask3D(dims, std::vector<std::uint8_t>(dims.count(), value));
}

void crop_into(std::span<const double> src, const Dims& src_dims, Index3 origin,
               const Dims& size, std::vector<double>& out) {
  out.resize(size.count());
  for (std::size_t k = 0; k < size.nz; ++k) {
    for (std::size_t j = 0; j < size.ny; ++j) {
      const auto* row = src.data() +
                        linear_index(src_dims, origin.i, origin.j + j, origin.k + k);
      std::copy_n(row, size.nx, out.data() + linear_index(size, 0, j, k));
    }
  }
}

void check_patch_bounds(const Dims& dims, Index3 origin, Dims size) {
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (size[axis] == 0 || origin[axis] + size[axis] > dims[axis]) {
      std::ostringstream os;
      os << "patch origin (" << origin.i << "," << origin.j << "," << origin.k
         << ") size " << describe(size) << " exceeds volume " << describe(dims);
      throw Error(ErrorKind::InvalidInput, os.str());
    }
  }
}

}  // namespace

Volume3D::Volume3D(Dims dims, Spacing spacing, std::vector<double> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
  if (dims_.count() == 0) {
    throw Error(ErrorKind::InvalidInput, "volume has a zero extent: " + describe(dims_));
  }
  if (data_.size() != dims_.count()) {
    throw Error(ErrorKind::InvalidInput,
                "data length " + std::to_string(data_.size()) +
                    " does not match dims " + describe(dims_));
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (!(spacing_[axis] > 0.0) || !std::isfinite(spacing_[axis])) {
      throw Error(ErrorKind::InvalidInput,
                  "spacing must be strictly positive on axis " + std::to_string(axis));
    }
  }
  const auto bad = std::find_if(data_.begin(), data_.end(),
                                [](double v) { return !std::isfinite(v); });
  if (bad != data_.end()) {
    throw Error(ErrorKind::InvalidInput,
                "non-finite value at index " + std::to_string(bad - data_.begin()));
  }
}

Volume3D Volume3D::zeros(Dims dims, Spacing spacing) {
  return Volume3D(dims, spacing, std::vector<double>(dims.count(), 0.0));
}

bool bit_identical(const Volume3D& a, const Volume3D& b) noexcept {
  return a.dims_ == b.dims_ && a.spacing_ == b.spacing_ &&
         a.data_.size() == b.data_.size() &&
         std::memcmp(a.data_.data(), b.data_.data(),
                     a.data_.size() * sizeof(double)) == 0;
}

Mask3D::Mask3D(Dims dims, std::vector<std::uint8_t> data)
    : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.count()) {
    throw Error(ErrorKind::InvalidInput,
                "mask length " + std::to_string(data_.size()) +
                    " does not match dims " + describe(dims_));
  }
  const auto bad = std::find_if(data_.begin(), data_.end(),
                                [](std::uint8_t v) { return v > 1; });
  if (bad != data_.end()) {
    throw Error(ErrorKind::NonBinaryMask,
                "index " + std::to_string(bad - data_.begin()) + " has value " +
                    std::to_string(static_cast<int>(*bad)));
  }
}

Mask3D Mask3D::zeros(Dims dims) { return filled_mask(dims, 0); }
Mask3D Mask3D::ones(Dims dims) { return filled_mask(dims, 1); }

std::size_t Mask3D::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

bool Mask3D::has_foreground() const noexcept {
  return std::find(data_.begin(), data_.end(), 1) != data_.end();
}

Study::Study(ChannelMap channels, std::optional<Mask3D> mask)
    : channels_(std::move(channels)), mask_(std::move(mask)) {
  if (channels_.empty()) {
    throw Error(ErrorKind::InvalidInput, "study has no channels");
  }
  const auto& first = channels_.begin()->second;
  dims_ = first.dims();
  spacing_ = first.spacing();
  for (const auto& [name, vol] : channels_) {
    if (vol.dims() != dims_) {
      throw Error(ErrorKind::InvalidInput, "channel '" + name + "' has dims " +
                                               describe(vol.dims()) + ", expected " +
                                               describe(dims_));
    }
    if (vol.spacing() != spacing_) {
      throw Error(ErrorKind::InvalidInput,
                  "channel '" + name + "' spacing differs from the other channels");
    }
  }
  if (mask_) require_same_dims(mask_->dims(), dims_, "mask");
}

const Volume3D& Study::channel(const std::string& name) const {
  auto it = channels_.find(name);
  if (it == channels_.end()) {
    throw Error(ErrorKind::InvalidInput, "unknown channel '" + name + "'");
  }
  return it->second;
}

Study Study::with_channel(const std::string& name, Volume3D volume) const {
  ChannelMap copy = channels_;
  copy.insert_or_assign(name, std::move(volume));
  return Study(std::move(copy), mask_);
}

bool bit_identical(const Study& a, const Study& b) noexcept {
  if (a.mask_ != b.mask_ || a.channels_.size() != b.channels_.size()) return false;
  return std::equal(a.channels_.begin(), a.channels_.end(), b.channels_.begin(),
                    [](const auto& x, const auto& y) {
                      return x.first == y.first && bit_identical(x.second, y.second);
                    });
}

std::pair<double, double> minmax(const Volume3D& vol) {
  if (vol.empty()) throw Error(ErrorKind::InvalidInput, "minmax of an empty volume");
  const auto [lo, hi] = std::minmax_element(vol.data().begin(), vol.data().end());
  return {*lo, *hi};
}

std::pair<double, double> minmax_masked(const Volume3D& vol, const Mask3D& mask) {
  require_same_dims(vol.dims(), mask.dims(), "minmax_masked");
  const auto values = vol.data();
  const auto bits = mask.data();
  bool found = false;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!bits[n]) continue;
    const double v = values[n];
    if (!found) {
      lo = hi = v;
      found = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!found) throw Error(ErrorKind::EmptyForeground, "mask has no foreground voxels");
  return {lo, hi};
}

Volume3D pointwise_mix(const Volume3D& a, const Volume3D& b, const Mask3D& mask) {
  require_same_dims(a.dims(), b.dims(), "pointwise_mix");
  require_same_dims(a.dims(), mask.dims(), "pointwise_mix mask");
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bits = mask.data();
  const auto src = b.data();
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (bits[n]) out[n] = src[n];
  }
  return Volume3D(a.dims(), a.spacing(), std::move(out));
}

Mask3D validate_mask(const Volume3D& raw) {
  std::vector<std::uint8_t> bits(raw.size());
  const auto values = raw.data();
  for (std::size_t n = 0; n < values.size(); ++n) {
    const double v = values[n];
    if (v == 0.0) {
      bits[n] = 0;
    } else if (v == 1.0) {
      bits[n] = 1;
    } else {
      std::ostringstream os;
      os << "index " << n << " has value " << v;
      throw Error(ErrorKind::NonBinaryMask, os.str());
    }
  }
  return Mask3D(raw.dims(), std::move(bits));
}

Volume3D mask_to_volume(const Mask3D& mask, Spacing spacing) {
  std::vector<double> values(mask.data().begin(), mask.data().end());
  return Volume3D(mask.dims(), spacing, std::move(values));
}

Volume3D extract_patch(const Volume3D& vol, Index3 origin, Dims size) {
  check_patch_bounds(vol.dims(), origin, size);
  std::vector<double> out;
  crop_into(vol.data(), vol.dims(), origin, size, out);
  return Volume3D(size, vol.spacing(), std::move(out));
}

Study extract_patch(const Study& study, Index3 origin, Dims size) {
  check_patch_bounds(study.dims(), origin, size);
  Study::ChannelMap channels;
  for (const auto& [name, vol] : study.channels()) {
    channels.emplace(name, extract_patch(vol, origin, size));
  }
  std::optional<Mask3D> mask;
  if (study.mask()) {
    const auto& src = *study.mask();
    std::vector<std::uint8_t> bits(size.count());
    for (std::size_t k = 0; k < size.nz; ++k) {
      for (std::size_t j = 0; j < size.ny; ++j) {
        const auto* row = src.data().data() +
                          linear_index(src.dims(), origin.i, origin.j + j, origin.k + k);
        std::copy_n(row, size.nx, bits.data() + linear_index(size, 0, j, k));
      }
    }
    mask.emplace(size, std::move(bits));
  }
  return Study(std::move(channels), std::move(mask));
}

}  // namespace lesionforge
