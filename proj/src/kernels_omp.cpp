#include <omp.h>

#include <algorithm>
#include <cstddef>

#include "decam/kernels.hpp"

namespace decam {

void set_max_jobs(int jobs) {
  static const int runtime_default = omp_get_max_threads();
  omp_set_num_threads(jobs > 0 ? jobs : runtime_default);
}

namespace parallel {

std::vector<BinaryMask> rasterize_all(std::span<const Individual> individuals, int height, int width) {
  std::vector<BinaryMask> masks(individuals.size());
  const auto n = static_cast<std::ptrdiff_t>(individuals.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    masks[i] = rasterize(individuals[i], height, width);
  }
  return masks;
}

std::vector<Image> apply_masks(const Image& image, std::span<const BinaryMask> masks) {
  std::vector<Image> out(masks.size());
  const int channels = image.channels();
  const auto n = static_cast<std::ptrdiff_t>(masks.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Image masked = image;
    auto data = masked.data();
    const auto bits = masks[i].bits();
    for (std::size_t p = 0; p < bits.size(); ++p) {
      if (bits[p]) continue;
      for (int c = 0; c < channels; ++c) data[p * channels + c] = 0.0f;
    }
    out[i] = std::move(masked);
  }
  return out;
}

std::vector<std::uint32_t> coverage_counts(std::span<const BinaryMask> masks) {
  if (masks.empty()) return {};
  const auto pixels = static_cast<std::ptrdiff_t>(masks.front().size());
  std::vector<std::uint32_t> counts(pixels, 0);
  // Each thread owns a block of counters and sweeps it mask by mask, so
  // reads stay contiguous and no two threads touch the same counter.
  constexpr std::ptrdiff_t kBlock = 4096;
  const std::ptrdiff_t blocks = (pixels + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t lo = b * kBlock, hi = std::min(pixels, lo + kBlock);
    for (const auto& mask : masks) {
      const std::uint8_t* bits = mask.bits().data();
      for (std::ptrdiff_t p = lo; p < hi; ++p) counts[p] += bits[p];
    }
  }
  return counts;
}

Image gaussian_blur(const Image& image, double sigma, int kernel_size) {
  const auto taps = gaussian_taps(sigma, kernel_size);
  const int half = kernel_size / 2;
  const int h = image.height(), w = image.width(), ch = image.channels();
  std::vector<double> tmp(image.shape().values());
  auto idx = [&](int row, int col, int c) { return (static_cast<std::size_t>(row) * w + col) * ch + c; };
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) {
          acc += taps[t + half] * image.at(row, std::clamp(col + t, 0, w - 1), c);
        }
        tmp[idx(row, col, c)] = acc;
      }
    }
  }
  Image out(image.shape());
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) {
          acc += taps[t + half] * tmp[idx(std::clamp(row + t, 0, h - 1), col, c)];
        }
        out.at(row, col, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace parallel
}  // namespace decam
