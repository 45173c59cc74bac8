#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lesionforge/augment.hpp"
#include "lesionforge/error.hpp"
#include "support/generators.hpp"

using namespace lesionforge;

namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

Study two_channel_study(std::mt19937_64& rng, Dims d) {
  return Study(Study::ChannelMap{{"b1000", testkit::random_volume(rng, d)},
                                 {"flair", testkit::random_volume(rng, d)}},
               testkit::random_mask(rng, d, 0.3, true));
}

}  // namespace

TEST(GaussianNoise, ZeroSigmaIsIdentity) {
  std::mt19937_64 rng(1);
  const auto v = testkit::random_volume(rng, {5, 5, 5});
  RandomStream s(1);
  EXPECT_TRUE(bit_identical(op_gaussian_noise(v, 0.0, s), v));
}

TEST(GaussianNoise, MomentsOnZeroVolume) {
  const auto zero = Volume3D::zeros({32, 32, 32});
  RandomStream s(2024);
  const auto out = op_gaussian_noise(zero, 1.0, s);
  EXPECT_NEAR(mean(out.data()), 0.0, 0.05);
  EXPECT_NEAR(sd(out.data()), 1.0, 0.05);
}

TEST(GaussianNoise, ReproducibleAndValidated) {
  const auto zero = Volume3D::zeros({8, 8, 8});
  RandomStream a(9), b(9);
  EXPECT_TRUE(bit_identical(op_gaussian_noise(zero, 0.5, a), op_gaussian_noise(zero, 0.5, b)));
  EXPECT_THROW(op_gaussian_noise(zero, -1.0, a), Error);
}

TEST(RicianNoise, ZeroSigmaIsAbsoluteValue) {
  const Volume3D v({3, 1, 1}, {}, {-2.0, 0.0, 3.5});
  RandomStream s(3);
  const auto out = op_rician_noise(v, 0.0, s);
  EXPECT_EQ(out[0], 2.0);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_EQ(out[2], 3.5);
  std::mt19937_64 rng(4);
  const auto pos = testkit::random_volume(rng, {4, 4, 4});
  const auto [lo, hi] = minmax(pos);
  if (lo >= 0.0) {
    EXPECT_TRUE(bit_identical(op_rician_noise(pos, 0.0, s), pos));
  }
  EXPECT_THROW(op_rician_noise(v, -0.1, s), Error);
}

TEST(RicianNoise, RayleighOnZeroVolume) {
  const auto zero = Volume3D::zeros({32, 32, 32});
  RandomStream s(77);
  const auto out = op_rician_noise(zero, 1.0, s);
  for (double x : out.data()) ASSERT_GE(x, 0.0);

  // Monte-Carlo oracle for the Rayleigh mean, independent of RandomStream.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  double acc = 0.0;
  const int trials = 2'000'000;
  for (int i = 0; i < trials; ++i) acc += std::hypot(n01(rng), n01(rng));
  const double mc_mean = acc / trials;
  EXPECT_NEAR(mc_mean, std::sqrt(std::acos(-1.0) / 2.0), 0.002);
  EXPECT_NEAR(mean(out.data()), mc_mean, 0.05);
}

TEST(GaussianBlur, ZeroSigmaAndConstant) {
  std::mt19937_64 rng(6);
  const auto v = testkit::random_volume(rng, {6, 5, 4}, {1.0, 2.0, 0.5});
  EXPECT_TRUE(bit_identical(op_gaussian_blur(v, 0.0), v));

  const Volume3D flat({6, 5, 4}, {1.0, 2.0, 0.5}, std::vector<double>(120, 42.5));
  const auto out = op_gaussian_blur(flat, 1.3);
  for (double x : out.data()) ASSERT_NEAR(x, 42.5, 1e-9);
  EXPECT_THROW(op_gaussian_blur(v, -1.0), Error);
}

TEST(GaussianBlur, ImpulseMassConserved) {
  const Dims d{21, 21, 21};
  std::vector<double> data(d.count(), 0.0);
  data[linear_index(d, 10, 10, 10)] = 1.0;
  const Volume3D impulse(d, {}, std::move(data));
  const auto out = op_gaussian_blur(impulse, 1.0);
  EXPECT_NEAR(std::accumulate(out.data().begin(), out.data().end(), 0.0), 1.0, 1e-6);
  // Separable kernel: the centre equals the cube of the 1D centre tap.
  const auto k = gaussian_kernel(1.0);
  EXPECT_EQ(k.size(), 7u);
  EXPECT_NEAR(out.at(10, 10, 10), std::pow(k[3], 3), 1e-15);
  EXPECT_NEAR(out.at(11, 10, 10), k[4] * k[3] * k[3], 1e-15);
}

TEST(GaussianBlur, AnisotropicSpacingUsesPerAxisSigma) {
  const Dims d{15, 15, 15};
  std::vector<double> data(d.count(), 0.0);
  data[linear_index(d, 7, 7, 7)] = 1.0;
  const Volume3D impulse(d, {1.0, 1.0, 3.0}, std::move(data));
  const auto out = op_gaussian_blur(impulse, 1.5);
  // sigma 1.5 voxels along x, 0.5 voxels along z: z neighbours get less mass.
  EXPECT_GT(out.at(8, 7, 7), out.at(7, 7, 8));
}

TEST(Brightness, IdentityAndAffine) {
  std::mt19937_64 rng(7);
  const auto v = testkit::random_volume(rng, {4, 4, 4});
  EXPECT_TRUE(bit_identical(op_brightness(v, 0.0, 1.0), v));
  const auto out = op_brightness(v, 3.0, 2.0);
  for (std::size_t n = 0; n < v.size(); ++n) EXPECT_EQ(out[n], 2.0 * v[n] + 3.0);
}

TEST(Contrast, IdentityAndMeanPreserved) {
  std::mt19937_64 rng(8);
  const auto v = testkit::random_volume(rng, {4, 4, 4});
  EXPECT_TRUE(bit_identical(op_contrast(v, 1.0), v));
  const auto out = op_contrast(v, 0.5);
  EXPECT_NEAR(mean(out.data()), mean(v.data()), 1e-9 * std::max(1.0, std::abs(mean(v.data()))));
  EXPECT_NEAR(sd(out.data()), 0.5 * sd(v.data()), 1e-9 * sd(v.data()));
}

TEST(Mirror, InvolutionAndLockstep) {
  std::mt19937_64 rng(9);
  const auto study = two_channel_study(rng, {5, 4, 3});
  for (int axis = 0; axis < 3; ++axis) {
    const int axes[] = {axis};
    const auto once = flip_axes(study, axes);
    EXPECT_FALSE(bit_identical(once, study));
    EXPECT_TRUE(bit_identical(flip_axes(once, axes), study));
  }
  const int x[] = {0};
  const auto flipped = flip_axes(study, x);
  for (std::size_t n = 0; n < 5; ++n) {
    EXPECT_EQ(flipped.channel("b1000").at(n, 1, 2), study.channel("b1000").at(4 - n, 1, 2));
    EXPECT_EQ((*flipped.mask())[linear_index(study.dims(), n, 1, 2)],
              (*study.mask())[linear_index(study.dims(), 4 - n, 1, 2)]);
  }
  const int bad[] = {3};
  EXPECT_THROW(flip_axes(study, bad), Error);
}

TEST(Mirror, RandomAxesFollowStream) {
  std::mt19937_64 rng(10);
  const auto study = two_channel_study(rng, {4, 4, 4});
  const int axes[] = {0, 1, 2};
  RandomStream s(31), replay(31);
  std::vector<int> flipped;
  const auto out = op_mirror(study, axes, s, &flipped);
  std::vector<int> expected;
  for (int a : axes) {
    if (replay.uniform() < 0.5) expected.push_back(a);
  }
  EXPECT_EQ(flipped, expected);
  EXPECT_TRUE(bit_identical(out, flip_axes(study, expected)));
}

TEST(RandomPatch, UniformOriginAndErrors) {
  std::mt19937_64 rng(11);
  const auto study = two_channel_study(rng, {10, 8, 6});
  RandomStream s(5);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 700; ++i) {
    Index3 origin;
    const auto patch = op_random_patch(study, {4, 4, 4}, s, &origin);
    ASSERT_LE(origin.i, 6u);
    ASSERT_LE(origin.j, 4u);
    ASSERT_LE(origin.k, 2u);
    ++seen[origin.i];
    ASSERT_TRUE(bit_identical(patch, extract_patch(study, origin, {4, 4, 4})));
  }
  for (int count : seen) EXPECT_GT(count, 50);
  try {
    op_random_patch(study, {11, 4, 4}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}
