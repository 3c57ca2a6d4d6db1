#pragma once

#include <filesystem>

#include "decam/aggregation.hpp"
#include "decam/image.hpp"

namespace decam {

// Raw map: "DECAMSM1", H and W as little-endian uint32, then H*W
// little-endian float32 values, row-major.
void write_saliency_raw(const std::filesystem::path& path, const SaliencyMap& sm);
SaliencyMap read_saliency_raw(const std::filesystem::path& path);

// round(255 * value) per pixel.
Image quantize_saliency(const SaliencyMap& sm);
void write_saliency_png(const std::filesystem::path& path, const SaliencyMap& sm);

// Map blended over the input at 50%.
void write_overlay_png(const std::filesystem::path& path, const Image& image,
                       const SaliencyMap& sm);

}  // namespace decam
