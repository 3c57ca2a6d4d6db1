#include <gtest/gtest.h>

#include <random>

#include "decam/de_core.hpp"
#include "decam/error.hpp"
#include "decam/kernels.hpp"
#include "test_oracles.hpp"

namespace decam {
namespace {

std::vector<Individual> random_population(std::size_t n, int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Individual> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_individual(5, h, w, rng));
  return out;
}

TEST(Kernels, RasterizeParallelMatchesSerial) {
  const auto pop = random_population(64, 50, 60, 1);
  EXPECT_EQ(parallel::rasterize_all(pop, 50, 60), serial::rasterize_all(pop, 50, 60));
}

TEST(Kernels, ApplyMasksParallelMatchesSerial) {
  const Image img = testing::noise_image({32, 32, 3}, 4);
  const auto masks = serial::rasterize_all(random_population(20, 32, 32, 2), 32, 32);
  const auto a = parallel::apply_masks(img, masks);
  const auto b = serial::apply_masks(img, masks);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Kernels, ApplyMasksZeroesEveryChannel) {
  const Image img = testing::noise_image({20, 20, 3}, 9);
  std::mt19937_64 rng(2);
  const BinaryMask m = testing::random_mask(20, 20, rng);
  const std::vector<BinaryMask> masks{m};
  EXPECT_EQ(parallel::apply_masks(img, masks).front(), testing::masked(img, m));
}

TEST(Kernels, CoverageParallelMatchesSerial) {
  const auto masks = serial::rasterize_all(random_population(100, 24, 24, 3), 24, 24);
  EXPECT_EQ(parallel::coverage_counts(masks), serial::coverage_counts(masks));
}

TEST(Kernels, BlurParallelMatchesSerial) {
  const Image img = testing::noise_image({40, 30, 3}, 5, 0.0f, 1.0f);
  EXPECT_EQ(parallel::gaussian_blur(img, 5.0, 11), serial::gaussian_blur(img, 5.0, 11));
  EXPECT_EQ(parallel::gaussian_blur(img, 1.3, 3), serial::gaussian_blur(img, 1.3, 3));
}

TEST(Kernels, BlurKeepsConstantImages) {
  const Image img(ImageShape{25, 25, 1}, 0.25f);
  const Image out = parallel::gaussian_blur(img, 5.0, 11);
  for (float v : out.data()) EXPECT_NEAR(v, 0.25f, 1e-6);
}

TEST(Kernels, BlurOfImpulseIsSeparableGaussian) {
  Image img(ImageShape{21, 21, 1}, 0.0f);
  img.at(10, 10, 0) = 1.0f;
  const auto taps = gaussian_taps(2.0, 7);
  const Image out = serial::gaussian_blur(img, 2.0, 7);
  for (int r = 7; r <= 13; ++r)
    for (int c = 7; c <= 13; ++c) EXPECT_NEAR(out.at(r, c, 0), taps[r - 7] * taps[c - 7], 1e-7);
  EXPECT_EQ(out.at(3, 10, 0), 0.0f);
}

TEST(Kernels, GaussianTapsValidation) {
  EXPECT_THROW(gaussian_taps(0.0, 5), Error);
  EXPECT_THROW(gaussian_taps(1.0, 4), Error);
  EXPECT_THROW(gaussian_taps(1.0, 0), Error);
  const auto taps = gaussian_taps(5.0, 11);
  double sum = 0;
  for (double t : taps) sum += t;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(taps[0], taps[10]);
}

TEST(Kernels, JobCapDoesNotChangeResults) {
  const auto pop = random_population(40, 30, 30, 11);
  set_max_jobs(1);
  const auto one = parallel::rasterize_all(pop, 30, 30);
  set_max_jobs(0);
  EXPECT_EQ(one, parallel::rasterize_all(pop, 30, 30));
}

}  // namespace
}  // namespace decam
