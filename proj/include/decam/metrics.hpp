#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "decam/aggregation.hpp"
#include "decam/image.hpp"
#include "decam/scorer.hpp"

namespace decam {

enum class CurveKind { kInsertion, kDeletion };

struct MetricCurve {
  CurveKind kind = CurveKind::kDeletion;
  std::vector<double> xs;  // fraction of pixels inserted or deleted, 0 .. 1
  std::vector<double> ys;
};

/// How raw model output becomes a curve value. Single-logit scorers go
/// through the logistic function; scorers exposing all class logits use
/// the softmax probability of the class.
enum class ScoreTransform { kLogistic, kSoftmax };
const char* to_string(ScoreTransform t);
ScoreTransform transform_for(const Scorer& scorer);

struct MetricConfig {
  int steps = 100;
  double blur_sigma = 5.0;
  int blur_kernel = 11;
  std::size_t batch_size = 64;

  void validate() const;
};

/// Pixel indices sorted by saliency, highest first; equal values keep
/// row-major order.
std::vector<std::size_t> saliency_order(const SaliencyMap& sm);

/// Step t zeroes the first floor(t * H * W / steps) pixels of the order.
MetricCurve deletion_curve(const Image& image, const SaliencyMap& sm, Scorer& scorer,
                           std::size_t class_index, const MetricConfig& cfg);

/// Starts from the blurred image and restores original pixels in order.
MetricCurve insertion_curve(const Image& image, const SaliencyMap& sm, Scorer& scorer,
                            std::size_t class_index, const MetricConfig& cfg);

/// Trapezoidal area under ys over xs.
double auc(const MetricCurve& curve);

struct EvalReport {
  double auc_insertion = 0.0;
  double auc_deletion = 0.0;
  double diff_auc = 0.0;  // 100 * (insertion - deletion)
  ScoreTransform transform = ScoreTransform::kLogistic;
  MetricCurve insertion;
  MetricCurve deletion;
};

EvalReport diff_auc(const Image& image, const SaliencyMap& sm, Scorer& scorer,
                    std::size_t class_index, const MetricConfig& cfg);

void write_curve_csv(const std::filesystem::path& path, const MetricCurve& curve);
void write_report(const std::filesystem::path& path, const EvalReport& report,
                  const MetricConfig& cfg);

}  // namespace decam
