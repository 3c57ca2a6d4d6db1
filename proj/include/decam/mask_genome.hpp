#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace decam {

/// One ellipse of a mask: the axis-aligned box [x0, x1] x [y0, y1] in
/// pixel coordinates (x along columns, y along rows) and a rotation r about
/// the box centre. The ellipse is the one inscribed in the box, rotated.
struct EllipseGene {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  double r = 0.0;

  static constexpr std::size_t kFields = 5;
  friend bool operator==(const EllipseGene&, const EllipseGene&) = default;
};

/// A candidate mask: K ellipses plus the cached fitness of that mask.
struct Individual {
  std::vector<EllipseGene> genes;
  std::optional<double> fitness;

  std::size_t k() const { return genes.size(); }
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, std::uint8_t fill = 0)
      : height_(height), width_(width),
        bits_(static_cast<std::size_t>(height) * width, fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }

  std::uint8_t& at(int row, int col) { return bits_[static_cast<std::size_t>(row) * width_ + col]; }
  std::uint8_t at(int row, int col) const { return bits_[static_cast<std::size_t>(row) * width_ + col]; }

  std::span<std::uint8_t> bits() { return bits_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Span limits for ellipse boxes on an H x W image: min(H, W)/20 and
/// min(H, W)/4 per axis.
struct SpanLimits {
  double min_span;
  double max_span;
};
SpanLimits span_limits(int height, int width);

/// Flattens genes ellipse-major, field-minor: [x0, y0, x1, y1, r, x0, ...].
std::vector<double> flatten(const Individual& ind);

/// Turns a raw 5K vector into a valid individual. Corners are ordered,
/// clamped into the image and pushed until each box side lies within
/// span_limits; r is wrapped into [0, pi). Applying it to a valid
/// individual returns the same genes bit for bit.
///
/// Throws kDimensionMismatch if raw.size() != 5 * k, kInvalidGeometry if
/// min(H, W) < 20 or a gene is not finite.
Individual clip_genes(std::span<const double> raw, std::size_t k, int height, int width);

/// True when every gene satisfies the clipping invariants for (H, W).
bool is_valid(const Individual& ind, int height, int width);

/// Union of the K ellipses, sampled at pixel centres (col + 0.5, row + 0.5).
/// Boundary points are inside.
BinaryMask rasterize(const Individual& ind, int height, int width);

/// ORs one ellipse into an existing mask.
void rasterize_into(const EllipseGene& gene, BinaryMask& mask);

double mask_fraction(const BinaryMask& mask);

}  // namespace decam
