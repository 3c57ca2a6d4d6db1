#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace decam {

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t pixels() const { return static_cast<std::size_t>(height) * width; }
  std::size_t values() const { return pixels() * channels; }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

// H x W x C image, row-major with channels last, values in [0, 1].
class Image {
 public:
  Image() = default;
  explicit Image(ImageShape shape, float fill = 0.0f);
  Image(ImageShape shape, std::vector<float> data);

  const ImageShape& shape() const { return shape_; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }

  float& at(int row, int col, int ch) {
    return data_[(static_cast<std::size_t>(row) * shape_.width + col) * shape_.channels + ch];
  }
  float at(int row, int col, int ch) const {
    return data_[(static_cast<std::size_t>(row) * shape_.width + col) * shape_.channels + ch];
  }

  // Sum over channels of the pixel at a flat row-major pixel index.
  double brightness(std::size_t pixel) const;

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  ImageShape shape_;
  std::vector<float> data_;
};

// Throws kInvalidArgument unless every value is finite and in [0, 1] and
// the spatial size is at least 20 x 20.
void validate_image(const Image& image);

// 8-bit PNG with 1 or 3 channels. Alpha is dropped; palette and 16-bit
// inputs are converted by libpng.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace decam
