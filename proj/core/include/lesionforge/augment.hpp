#pragma once

#include <array>
#include <span>
#include <vector>

#include "lesionforge/random.hpp"
#include "lesionforge/volume.hpp"

namespace lesionforge {

/// Population standard deviation of all voxels.
double intensity_sd(const Volume3D& vol);

/// I + n, n ~ N(0, sigma^2) i.i.d. sigma == 0 returns an exact copy.
Volume3D op_gaussian_noise(const Volume3D& vol, double sigma, RandomStream& stream);

/// sqrt((I + n1)^2 + n2^2) with n1, n2 ~ N(0, sigma^2). sigma == 0 gives |I|.
Volume3D op_rician_noise(const Volume3D& vol, double sigma, RandomStream& stream);

/// Separable Gaussian smoothing; per-axis sigma in voxels is
/// sigma_mm / spacing. Kernels are truncated at 3 sigma and normalised;
/// borders clamp to the edge voxel.
Volume3D op_gaussian_blur(const Volume3D& vol, double sigma_mm);

/// Normalised 1D Gaussian taps for the given sigma (in voxels), length
/// 2 * ceil(3 sigma) + 1.
std::vector<double> gaussian_kernel(double sigma_voxels);

/// scale * I + shift.
Volume3D op_brightness(const Volume3D& vol, double shift, double scale);

/// mean + factor * (I - mean), mean over the whole volume.
Volume3D op_contrast(const Volume3D& vol, double factor);

/// Reverses the voxel order along each listed axis (0 = x, 1 = y, 2 = z) for
/// every channel and the mask.
Study flip_axes(const Study& study, std::span<const int> axes);

/// Flips each listed axis with probability 1/2 (one stream draw per axis).
/// The axes actually flipped are written to `flipped` when given.
Study op_mirror(const Study& study, std::span<const int> axes, RandomStream& stream,
                std::vector<int>* flipped = nullptr);

/// Crops a patch of `size` at an origin drawn uniformly among valid origins
/// (one stream draw per axis). Throws config when the patch does not fit.
Study op_random_patch(const Study& study, Dims size, RandomStream& stream,
                      Index3* origin = nullptr);

}  // namespace lesionforge
