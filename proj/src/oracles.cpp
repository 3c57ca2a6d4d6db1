#include <string>
#include <vector>

#include "decam/error.hpp"
#include "decam/scorer.hpp"

namespace decam {

bool Disc::contains(int row, int col) const {
  const double dr = row + 0.5 - center_row;
  const double dc = col + 0.5 - center_col;
  return dr * dr + dc * dc <= radius * radius;
}

namespace {

// Pixel labels: 0 is background, 1..n are the planted discs.
std::vector<int> label_discs(const ImageShape& shape, std::span<const Disc> discs) {
  std::vector<int> labels(shape.pixels(), 0);
  for (std::size_t d = 0; d < discs.size(); ++d) {
    const Disc& disc = discs[d];
    if (!(disc.radius > 0.0) || disc.center_row - disc.radius < 0.0 ||
        disc.center_col - disc.radius < 0.0 || disc.center_row + disc.radius > shape.height ||
        disc.center_col + disc.radius > shape.width) {
      throw Error(ErrorKind::kInvalidArgument, "disc " + std::to_string(d) + " does not fit in the image");
    }
    for (int row = 0; row < shape.height; ++row) {
      for (int col = 0; col < shape.width; ++col) {
        if (!disc.contains(row, col)) continue;
        int& label = labels[static_cast<std::size_t>(row) * shape.width + col];
        if (label != 0) throw Error(ErrorKind::kInvalidArgument, "oracle discs overlap");
        label = static_cast<int>(d) + 1;
      }
    }
  }
  return labels;
}

class RegionOracle final : public Scorer {
 public:
  RegionOracle(const Image& reference, std::vector<Disc> discs)
      : shape_(reference.shape()), discs_(std::move(discs)), labels_(label_discs(shape_, discs_)) {
    reference_sums_ = region_sums(reference);
    for (std::size_t r = 0; r < reference_sums_.size(); ++r) {
      if (!(reference_sums_[r] > 0.0)) {
        throw Error(ErrorKind::kDegenerateOracle,
                    r == 0 ? std::string("reference image has no brightness outside the discs")
                           : "reference image has no brightness inside disc " + std::to_string(r - 1));
      }
    }
  }

  bool concurrent() const override { return true; }

  std::string identity() const override {
    std::string id = discs_.size() == 1 ? "disc" : "twoblob";
    char sep = ':';
    for (const auto& d : discs_) {
      for (double v : {d.center_row, d.center_col, d.radius}) {
        id += sep;
        id += trim(v);
        sep = ',';
      }
    }
    return id;
  }

  std::optional<ImageShape> expected_shape() const override { return shape_; }

 protected:
  std::vector<double> do_score(std::span<const Image> batch, std::size_t) override {
    std::vector<double> logits;
    logits.reserve(batch.size());
    for (const auto& img : batch) {
      const auto sums = region_sums(img);
      double kept_inside = 0.0;
      for (std::size_t d = 1; d < sums.size(); ++d) kept_inside += sums[d] / reference_sums_[d];
      kept_inside /= static_cast<double>(discs_.size());
      logits.push_back(kept_inside - sums[0] / reference_sums_[0]);
    }
    return logits;
  }

 private:
  std::vector<double> region_sums(const Image& img) const {
    std::vector<double> sums(discs_.size() + 1, 0.0);
    for (std::size_t p = 0; p < labels_.size(); ++p) sums[labels_[p]] += img.brightness(p);
    return sums;
  }

  static std::string trim(double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  ImageShape shape_;
  std::vector<Disc> discs_;
  std::vector<int> labels_;
  std::vector<double> reference_sums_;
};

}  // namespace

std::unique_ptr<Scorer> make_disc_oracle(const Image& reference, const Disc& disc) {
  return std::make_unique<RegionOracle>(reference, std::vector<Disc>{disc});
}

std::unique_ptr<Scorer> make_two_blob_oracle(const Image& reference, const Disc& first,
                                             const Disc& second) {
  return std::make_unique<RegionOracle>(reference, std::vector<Disc>{first, second});
}

}  // namespace decam
