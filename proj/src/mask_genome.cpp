#include "decam/mask_genome.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "decam/error.hpp"

namespace decam {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orders, clamps and span-fixes one axis of a box. Every branch leaves the
// axis in a state that no branch changes again, which makes clipping
// idempotent without tolerances.
void clip_axis(double& lo, double& hi, double limit, const SpanLimits& span) {
  if (lo > hi) std::swap(lo, hi);
  lo = std::clamp(lo, 0.0, limit);
  hi = std::clamp(hi, 0.0, limit);
  if (hi - lo < span.min_span) {
    hi = lo + span.min_span;
    while (hi - lo < span.min_span) hi = std::nextafter(hi, kInf);
    if (hi > limit) {
      hi = limit;
      lo = limit - span.min_span;
      while (hi - lo < span.min_span) lo = std::nextafter(lo, -kInf);
    }
  } else if (hi - lo > span.max_span) {
    hi = lo + span.max_span;
    while (hi - lo > span.max_span) hi = std::nextafter(hi, -kInf);
  }
}

double wrap_angle(double r) {
  double w = std::fmod(r, std::numbers::pi);
  if (w < 0.0) w += std::numbers::pi;
  if (w >= std::numbers::pi) w = 0.0;
  return w;
}

bool axis_valid(double lo, double hi, double limit, const SpanLimits& span) {
  return lo >= 0.0 && hi <= limit && lo <= hi && hi - lo >= span.min_span &&
         hi - lo <= span.max_span;
}

struct EllipseFrame {
  double cx, cy, a, b, cos_r, sin_r;

  explicit EllipseFrame(const EllipseGene& g)
      : cx(0.5 * (g.x0 + g.x1)),
        cy(0.5 * (g.y0 + g.y1)),
        a(0.5 * std::abs(g.x1 - g.x0)),
        b(0.5 * std::abs(g.y1 - g.y0)),
        cos_r(std::cos(g.r)),
        sin_r(std::sin(g.r)) {}

  bool contains(double px, double py) const {
    const double dx = px - cx;
    const double dy = py - cy;
    const double u = cos_r * dx + sin_r * dy;
    const double v = -sin_r * dx + cos_r * dy;
    const double nu = u / a;
    const double nv = v / b;
    return nu * nu + nv * nv <= 1.0;
  }
};

}  // namespace

SpanLimits span_limits(int height, int width) {
  const double side = std::min(height, width);
  return {side / 20.0, side / 4.0};
}

std::vector<double> flatten(const Individual& ind) {
  std::vector<double> out;
  out.reserve(ind.genes.size() * EllipseGene::kFields);
  for (const auto& g : ind.genes) {
    out.insert(out.end(), {g.x0, g.y0, g.x1, g.y1, g.r});
  }
  return out;
}

Individual clip_genes(std::span<const double> raw, std::size_t k, int height, int width) {
  if (raw.size() != k * EllipseGene::kFields) {
    throw Error(ErrorKind::kDimensionMismatch, "gene vector has length " +
                                                   std::to_string(raw.size()) + ", expected " +
                                                   std::to_string(k * EllipseGene::kFields));
  }
  if (std::min(height, width) < 20) {
    throw Error(ErrorKind::kInvalidGeometry,
                "images smaller than 20 pixels per side leave no room for the minimum ellipse span");
  }
  const SpanLimits span = span_limits(height, width);
  Individual ind;
  ind.genes.reserve(k);
  for (std::size_t e = 0; e < k; ++e) {
    const double* g = raw.data() + e * EllipseGene::kFields;
    for (std::size_t f = 0; f < EllipseGene::kFields; ++f) {
      if (!std::isfinite(g[f])) {
        throw Error(ErrorKind::kInvalidGeometry, "non-finite gene at ellipse " + std::to_string(e));
      }
    }
    EllipseGene gene{g[0], g[1], g[2], g[3], wrap_angle(g[4])};
    clip_axis(gene.x0, gene.x1, width - 1.0, span);
    clip_axis(gene.y0, gene.y1, height - 1.0, span);
    ind.genes.push_back(gene);
  }
  return ind;
}

bool is_valid(const Individual& ind, int height, int width) {
  const SpanLimits span = span_limits(height, width);
  return std::all_of(ind.genes.begin(), ind.genes.end(), [&](const EllipseGene& g) {
    return axis_valid(g.x0, g.x1, width - 1.0, span) && axis_valid(g.y0, g.y1, height - 1.0, span) &&
           g.r >= 0.0 && g.r < std::numbers::pi;
  });
}

void rasterize_into(const EllipseGene& gene, BinaryMask& mask) {
  const EllipseFrame e(gene);
  // Axis-aligned half extents of the rotated ellipse, padded by a pixel so
  // no boundary centre is skipped.
  const double ex = std::hypot(e.a * e.cos_r, e.b * e.sin_r);
  const double ey = std::hypot(e.a * e.sin_r, e.b * e.cos_r);
  const int col_lo = std::max(0, static_cast<int>(std::floor(e.cx - ex - 0.5)) - 1);
  const int col_hi = std::min(mask.width() - 1, static_cast<int>(std::ceil(e.cx + ex - 0.5)) + 1);
  const int row_lo = std::max(0, static_cast<int>(std::floor(e.cy - ey - 0.5)) - 1);
  const int row_hi = std::min(mask.height() - 1, static_cast<int>(std::ceil(e.cy + ey - 0.5)) + 1);
  for (int row = row_lo; row <= row_hi; ++row) {
    const double py = row + 0.5;
    for (int col = col_lo; col <= col_hi; ++col) {
      if (e.contains(col + 0.5, py)) mask.at(row, col) = 1;
    }
  }
}

BinaryMask rasterize(const Individual& ind, int height, int width) {
  BinaryMask mask(height, width);
  for (const auto& gene : ind.genes) rasterize_into(gene, mask);
  return mask;
}

double mask_fraction(const BinaryMask& mask) {
  if (mask.size() == 0) return 0.0;
  std::size_t count = 0;
  for (auto bit : mask.bits()) count += bit;
  return static_cast<double>(count) / static_cast<double>(mask.size());
}

}  // namespace decam
