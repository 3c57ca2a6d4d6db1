#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decam/image.hpp"

namespace decam {

struct ScoreRequest {
  std::span<const Image> batch;
  std::size_t class_index = 0;
};

struct ScoreResponse {
  std::vector<double> logits;
};

/// The black-box model. Subclasses implement `do_score`; callers go
/// through `score_batch`, which validates the request (nonempty batch,
/// uniform shape, expected shape when the model advertises one) and the
/// response (one finite logit per image).
class Scorer {
 public:
  virtual ~Scorer() = default;

  ScoreResponse score_batch(const ScoreRequest& req);

  /// Full per-class logit vectors, row-major n x num_classes. Only
  /// available when `num_classes()` is set.
  std::vector<double> score_all(std::span<const Image> batch);

  /// Whether score_batch may be called from several threads at once.
  virtual bool concurrent() const = 0;

  /// Short description recorded in run manifests.
  virtual std::string identity() const = 0;

  virtual std::optional<ImageShape> expected_shape() const { return std::nullopt; }
  virtual std::optional<std::size_t> num_classes() const { return std::nullopt; }

 protected:
  virtual std::vector<double> do_score(std::span<const Image> batch, std::size_t class_index) = 0;
  virtual std::vector<double> do_score_all(std::span<const Image> batch);
};

/// Synthetic model with a planted salient disc. For an input X' the logit
/// is s_in - s_out, where s_in (s_out) is the brightness of X' inside
/// (outside) the disc divided by that of the reference image. A pixel
/// belongs to the disc when its centre is within `radius` of `center`.
struct Disc {
  double center_row = 0.0;
  double center_col = 0.0;
  double radius = 0.0;

  bool contains(int row, int col) const;
};

std::unique_ptr<Scorer> make_disc_oracle(const Image& reference, const Disc& disc);

/// Two disjoint discs; logit = mean of the per-disc s_in terms - s_out,
/// where s_out is measured outside both discs.
std::unique_ptr<Scorer> make_two_blob_oracle(const Image& reference, const Disc& first,
                                             const Disc& second);

/// Spreads calls over several independent scorers (e.g. bridge
/// processes) so that batches can be scored concurrently. Each call takes
/// the first idle worker.
std::unique_ptr<Scorer> make_pooled_scorer(std::vector<std::unique_ptr<Scorer>> workers);

}  // namespace decam
