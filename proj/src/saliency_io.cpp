#include "decam/saliency_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "decam/error.hpp"

namespace decam {
namespace {

constexpr char kMagic[8] = {'D', 'E', 'C', 'A', 'M', 'S', 'M', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

}  // namespace

void write_saliency_raw(const std::filesystem::path& path, const SaliencyMap& sm) {
  std::string bytes(kMagic, sizeof(kMagic));
  put_u32(bytes, static_cast<std::uint32_t>(sm.height));
  put_u32(bytes, static_cast<std::uint32_t>(sm.width));
  for (double v : sm.values) put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  std::ofstream out(path, std::ios::binary);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
}

SaliencyMap read_saliency_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kFormat, path.string() + ": not a saliency map (bad magic)");
  }
  const std::uint32_t h = get_u32(bytes.data() + 8);
  const std::uint32_t w = get_u32(bytes.data() + 12);
  const std::uint64_t expected = 16 + 4ull * h * w;
  if (h == 0 || w == 0 || bytes.size() != expected) {
    throw Error(ErrorKind::kFormat, path.string() + ": size does not match the " +
                                        std::to_string(h) + "x" + std::to_string(w) + " header");
  }
  SaliencyMap sm{static_cast<int>(h), static_cast<int>(w), std::vector<double>(std::size_t{h} * w)};
  for (std::size_t i = 0; i < sm.values.size(); ++i) {
    const float v = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i));
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw Error(ErrorKind::kFormat, path.string() + ": value out of [0, 1] at " + std::to_string(i));
    }
    sm.values[i] = v;
  }
  return sm;
}

Image quantize_saliency(const SaliencyMap& sm) {
  Image out(ImageShape{sm.height, sm.width, 1});
  auto data = out.data();
  for (std::size_t i = 0; i < sm.values.size(); ++i) {
    // Quantize the float32 value stored in the raw file so both outputs agree.
    const float raw = static_cast<float>(sm.values[i]);
    data[i] = static_cast<float>(std::round(255.0 * raw) / 255.0);
  }
  return out;
}

void write_saliency_png(const std::filesystem::path& path, const SaliencyMap& sm) {
  write_png(path, quantize_saliency(sm));
}

void write_overlay_png(const std::filesystem::path& path, const Image& image, const SaliencyMap& sm) {
  Image out(image.shape());
  for (int row = 0; row < image.height(); ++row) {
    for (int col = 0; col < image.width(); ++col) {
      const double s = sm.at(row, col);
      for (int c = 0; c < image.channels(); ++c) {
        out.at(row, col, c) = static_cast<float>(0.5 * image.at(row, col, c) + 0.5 * s);
      }
    }
  }
  write_png(path, out);
}

}  // namespace decam
