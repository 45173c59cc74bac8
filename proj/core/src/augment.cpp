#include "lesionforge/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lesionforge/error.hpp"

namespace lesionforge {
namespace {

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be finite and >= 0, got " << v;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

// One convolution pass along `axis`, reading `src` and writing `dst`.
void convolve_axis(const std::vector<double>& src, std::vector<double>& dst,
                   const Dims& dims, std::size_t axis,
                   const std::vector<double>& kernel) {
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? dims.nx : dims.nx * dims.ny);
  const auto length = static_cast<std::ptrdiff_t>(dims[axis]);

  // Iterate over every line parallel to `axis`.
  const std::size_t outer_a = axis == 0 ? dims.ny : dims.nx;
  const std::size_t outer_b = axis == 2 ? dims.ny : dims.nz;
  std::vector<double> line(static_cast<std::size_t>(length));
  for (std::size_t b = 0; b < outer_b; ++b) {
    for (std::size_t a = 0; a < outer_a; ++a) {
      std::size_t base = 0;
      switch (axis) {
        case 0: base = linear_index(dims, 0, a, b); break;
        case 1: base = linear_index(dims, a, 0, b); break;
        default: base = linear_index(dims, a, b, 0); break;
      }
      for (std::ptrdiff_t n = 0; n < length; ++n) {
        line[static_cast<std::size_t>(n)] = src[base + static_cast<std::size_t>(n) * stride];
      }
      for (std::ptrdiff_t n = 0; n < length; ++n) {
        double acc = 0.0;
        for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
          const auto at = std::clamp<std::ptrdiff_t>(n + t, 0, length - 1);
          acc += kernel[static_cast<std::size_t>(t + radius)] *
                 line[static_cast<std::size_t>(at)];
        }
        dst[base + static_cast<std::size_t>(n) * stride] = acc;
      }
    }
  }
}

template <typename T>
void flip_buffer(std::vector<T>& data, const Dims& dims, int axis) {
  for (std::size_t k = 0; k < dims.nz; ++k) {
    for (std::size_t j = 0; j < dims.ny; ++j) {
      for (std::size_t i = 0; i < dims.nx; ++i) {
        std::size_t ri = i, rj = j, rk = k;
        if (axis == 0) ri = dims.nx - 1 - i;
        if (axis == 1) rj = dims.ny - 1 - j;
        if (axis == 2) rk = dims.nz - 1 - k;
        const auto a = linear_index(dims, i, j, k);
        const auto b = linear_index(dims, ri, rj, rk);
        if (a < b) std::swap(data[a], data[b]);
      }
    }
  }
}

}  // namespace

double intensity_sd(const Volume3D& vol) {
  const auto values = vol.data();
  const double mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

Volume3D op_gaussian_noise(const Volume3D& vol, double sigma, RandomStream& stream) {
  require_non_negative(sigma, "noise sigma");
  if (sigma == 0.0) return vol;
  std::vector<double> out(vol.size());
  stream.fill_normal(out, sigma);
  const auto in = vol.data();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += in[n];
  return Volume3D(vol.dims(), vol.spacing(), std::move(out));
}

Volume3D op_rician_noise(const Volume3D& vol, double sigma, RandomStream& stream) {
  require_non_negative(sigma, "rician sigma");
  const auto in = vol.data();
  std::vector<double> out(in.size());
  if (sigma == 0.0) {
    std::transform(in.begin(), in.end(), out.begin(), [](double v) { return std::abs(v); });
  } else {
    for (std::size_t n = 0; n < out.size(); ++n) {
      const double real = in[n] + sigma * stream.normal();
      const double imag = sigma * stream.normal();
      out[n] = std::hypot(real, imag);
    }
  }
  return Volume3D(vol.dims(), vol.spacing(), std::move(out));
}

std::vector<double> gaussian_kernel(double sigma_voxels) {
  require_non_negative(sigma_voxels, "kernel sigma");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma_voxels));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  if (radius == 0) {
    taps[0] = 1.0;
    return taps;
  }
  for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
    const double x = static_cast<double>(t) / sigma_voxels;
    taps[static_cast<std::size_t>(t + radius)] = std::exp(-0.5 * x * x);
  }
  const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& w : taps) w /= total;
  return taps;
}

Volume3D op_gaussian_blur(const Volume3D& vol, double sigma_mm) {
  require_non_negative(sigma_mm, "blur sigma_mm");
  if (sigma_mm == 0.0) return vol;
  std::vector<double> current(vol.data().begin(), vol.data().end());
  std::vector<double> scratch(current.size());
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (vol.dims()[axis] < 2) continue;
    const auto kernel = gaussian_kernel(sigma_mm / vol.spacing()[axis]);
    if (kernel.size() == 1) continue;
    convolve_axis(current, scratch, vol.dims(), axis, kernel);
    current.swap(scratch);
  }
  return Volume3D(vol.dims(), vol.spacing(), std::move(current));
}

Volume3D op_brightness(const Volume3D& vol, double shift, double scale) {
  if (!std::isfinite(shift) || !std::isfinite(scale)) {
    throw Error(ErrorKind::InvalidParameter, "brightness shift and scale must be finite");
  }
  const auto in = vol.data();
  std::vector<double> out(in.size());
  std::transform(in.begin(), in.end(), out.begin(),
                 [=](double v) { return scale * v + shift; });
  return Volume3D(vol.dims(), vol.spacing(), std::move(out));
}

Volume3D op_contrast(const Volume3D& vol, double factor) {
  if (!std::isfinite(factor)) {
    throw Error(ErrorKind::InvalidParameter, "contrast factor must be finite");
  }
  if (factor == 1.0) return vol;
  const auto in = vol.data();
  const double mean = mean_of(in);
  std::vector<double> out(in.size());
  std::transform(in.begin(), in.end(), out.begin(),
                 [=](double v) { return mean + factor * (v - mean); });
  return Volume3D(vol.dims(), vol.spacing(), std::move(out));
}

Study flip_axes(const Study& study, std::span<const int> axes) {
  for (int axis : axes) {
    if (axis < 0 || axis > 2) {
      throw Error(ErrorKind::InvalidParameter,
                  "mirror axis must be 0, 1 or 2, got " + std::to_string(axis));
    }
  }
  const Dims dims = study.dims();
  Study::ChannelMap channels;
  for (const auto& [name, vol] : study.channels()) {
    std::vector<double> data(vol.data().begin(), vol.data().end());
    for (int axis : axes) flip_buffer(data, dims, axis);
    channels.emplace(name, Volume3D(dims, vol.spacing(), std::move(data)));
  }
  std::optional<Mask3D> mask;
  if (study.mask()) {
    std::vector<std::uint8_t> bits(study.mask()->data().begin(),
                                   study.mask()->data().end());
    for (int axis : axes) flip_buffer(bits, dims, axis);
    mask.emplace(dims, std::move(bits));
  }
  return Study(std::move(channels), std::move(mask));
}

Study op_mirror(const Study& study, std::span<const int> axes, RandomStream& stream,
                std::vector<int>* flipped) {
  std::vector<int> chosen;
  for (int axis : axes) {
    if (stream.uniform() < 0.5) chosen.push_back(axis);
  }
  if (flipped) *flipped = chosen;
  if (chosen.empty()) return study;
  return flip_axes(study, chosen);
}

Study op_random_patch(const Study& study, Dims size, RandomStream& stream,
                      Index3* origin) {
  const Dims& dims = study.dims();
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (size[axis] == 0 || size[axis] > dims[axis]) {
      std::ostringstream os;
      os << "patch size " << size.nx << "x" << size.ny << "x" << size.nz
         << " does not fit study of " << dims.nx << "x" << dims.ny << "x" << dims.nz;
      throw Error(ErrorKind::Config, os.str());
    }
  }
  std::array<std::size_t, 3> start{};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t choices = dims[axis] - size[axis] + 1;
    const auto pick = static_cast<std::size_t>(stream.uniform() * static_cast<double>(choices));
    start[axis] = std::min(pick, choices - 1);
  }
  const Index3 at{start[0], start[1], start[2]};
  if (origin) *origin = at;
  return extract_patch(study, at, size);
}

}  // namespace lesionforge
