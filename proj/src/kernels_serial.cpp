#include <algorithm>
#include <cmath>
#include <string>

#include "decam/error.hpp"
#include "decam/kernels.hpp"

namespace decam {

std::vector<double> gaussian_taps(double sigma, int kernel_size) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::kInvalidArgument, "blur sigma must be positive");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "blur kernel must be odd and positive, got " + std::to_string(kernel_size));
  }
  const int half = kernel_size / 2;
  std::vector<double> taps(kernel_size);
  double total = 0.0;
  for (int i = -half; i <= half; ++i) {
    taps[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += taps[i + half];
  }
  for (double& t : taps) t /= total;
  return taps;
}

namespace serial {

std::vector<BinaryMask> rasterize_all(std::span<const Individual> individuals, int height, int width) {
  std::vector<BinaryMask> masks;
  masks.reserve(individuals.size());
  for (const auto& ind : individuals) masks.push_back(rasterize(ind, height, width));
  return masks;
}

std::vector<Image> apply_masks(const Image& image, std::span<const BinaryMask> masks) {
  const int channels = image.channels();
  std::vector<Image> out;
  out.reserve(masks.size());
  for (const auto& mask : masks) {
    Image masked = image;
    auto data = masked.data();
    for (std::size_t p = 0; p < mask.size(); ++p) {
      if (mask.bits()[p]) continue;
      for (int c = 0; c < channels; ++c) data[p * channels + c] = 0.0f;
    }
    out.push_back(std::move(masked));
  }
  return out;
}

std::vector<std::uint32_t> coverage_counts(std::span<const BinaryMask> masks) {
  if (masks.empty()) return {};
  std::vector<std::uint32_t> counts(masks.front().size(), 0);
  for (const auto& mask : masks) {
    for (std::size_t p = 0; p < counts.size(); ++p) counts[p] += mask.bits()[p];
  }
  return counts;
}

Image gaussian_blur(const Image& image, double sigma, int kernel_size) {
  const auto taps = gaussian_taps(sigma, kernel_size);
  const int half = kernel_size / 2;
  const int h = image.height(), w = image.width(), ch = image.channels();
  std::vector<double> tmp(image.shape().values());
  auto idx = [&](int row, int col, int c) { return (static_cast<std::size_t>(row) * w + col) * ch + c; };
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) {
          const int cc = std::clamp(col + t, 0, w - 1);
          acc += taps[t + half] * image.at(row, cc, c);
        }
        tmp[idx(row, col, c)] = acc;
      }
    }
  }
  Image out(image.shape());
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) {
          const int rr = std::clamp(row + t, 0, h - 1);
          acc += taps[t + half] * tmp[idx(rr, col, c)];
        }
        out.at(row, col, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace serial
}  // namespace decam
