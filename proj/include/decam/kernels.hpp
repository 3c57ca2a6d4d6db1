#pragma once

// Data-parallel kernels used by the optimizer, aggregation and metrics.
// `parallel` is the OpenMP implementation used in production; `serial` is
// the straightforward reference kept for equivalence tests and the
// benchmark. Both namespaces expose identical signatures and must produce
// identical results.

#include <cstdint>
#include <span>
#include <vector>

#include "decam/image.hpp"
#include "decam/mask_genome.hpp"

namespace decam {

namespace serial {

std::vector<BinaryMask> rasterize_all(std::span<const Individual> individuals, int height, int width);

// X ⊙ M for every mask: all channels of an eliminated pixel are zeroed.
std::vector<Image> apply_masks(const Image& image, std::span<const BinaryMask> masks);

// Per-pixel count of masks covering the pixel.
std::vector<std::uint32_t> coverage_counts(std::span<const BinaryMask> masks);

// Separable Gaussian blur with a square odd-sided kernel and edge
// replication.
Image gaussian_blur(const Image& image, double sigma, int kernel_size);

}  // namespace serial

namespace parallel {

std::vector<BinaryMask> rasterize_all(std::span<const Individual> individuals, int height, int width);
std::vector<Image> apply_masks(const Image& image, std::span<const BinaryMask> masks);
std::vector<std::uint32_t> coverage_counts(std::span<const BinaryMask> masks);
Image gaussian_blur(const Image& image, double sigma, int kernel_size);

}  // namespace parallel

// Normalized 1-D Gaussian taps shared by both blur implementations.
// Throws kInvalidArgument unless sigma > 0 and kernel_size is odd and >= 1.
std::vector<double> gaussian_taps(double sigma, int kernel_size);

// Caps the OpenMP team size used by `parallel` kernels; 0 restores the
// runtime default.
void set_max_jobs(int jobs);

}  // namespace decam
