#include "decam/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "decam/error.hpp"

namespace decam {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kInvalidGeometry: return "invalid-geometry";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kScorerUnavailable: return "scorer-unavailable";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kNonFiniteOutput: return "non-finite-output";
    case ErrorKind::kDegenerateOracle: return "degenerate-oracle";
    case ErrorKind::kDegenerateSaliency: return "degenerate-saliency";
    case ErrorKind::kEmptyPopulation: return "empty-population";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Image::Image(ImageShape shape, float fill) : shape_(shape), data_(shape.values(), fill) {}

Image::Image(ImageShape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.values()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "image data has " + std::to_string(data_.size()) + " values, shape needs " +
                    std::to_string(shape_.values()));
  }
}

double Image::brightness(std::size_t pixel) const {
  double sum = 0.0;
  const float* p = data_.data() + pixel * shape_.channels;
  for (int c = 0; c < shape_.channels; ++c) sum += p[c];
  return sum;
}

void validate_image(const Image& image) {
  if (image.height() < 20 || image.width() < 20) {
    throw Error(ErrorKind::kInvalidArgument, "image must be at least 20x20, got " +
                                                 std::to_string(image.height()) + "x" +
                                                 std::to_string(image.width()));
  }
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(ErrorKind::kInvalidArgument,
                "image must have 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  for (float v : image.data()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw Error(ErrorKind::kInvalidArgument, "image values must be finite and in [0, 1]");
    }
  }
}

Image read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error(ErrorKind::kIo, "cannot read " + path.string() + ": " + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorKind::kIo, "cannot decode " + path.string() + ": " + msg);
  }
  ImageShape shape{static_cast<int>(png.height), static_cast<int>(png.width), channels};
  std::vector<float> data(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) data[i] = buffer[i] / 255.0f;
  return Image(shape, std::move(data));
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(ErrorKind::kInvalidArgument, "PNG output needs 1 or 3 channels");
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  std::vector<png_byte> buffer(image.shape().values());
  auto src = image.data();
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const float v = std::clamp(src[i], 0.0f, 1.0f);
    buffer[i] = static_cast<png_byte>(std::lround(255.0 * v));
  }
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    std::string msg = png.message;
    throw Error(ErrorKind::kIo, "cannot write " + path.string() + ": " + msg);
  }
}

}  // namespace decam
