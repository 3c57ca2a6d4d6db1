#include "decam/metrics.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "decam/error.hpp"
#include "decam/kernels.hpp"

namespace decam {
namespace {

using boost::multiprecision::cpp_rational;

std::vector<double> transformed_scores(Scorer& scorer, std::span<const Image> images,
                                       std::size_t class_index, ScoreTransform transform) {
  std::vector<double> out(images.size());
  if (transform == ScoreTransform::kLogistic) {
    const auto logits = scorer.score_batch({images, class_index}).logits;
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-logits[i]));
    return out;
  }
  const std::size_t classes = *scorer.num_classes();
  if (class_index >= classes) {
    throw Error(ErrorKind::kInvalidArgument, "class index out of range for the scorer");
  }
  const auto all = scorer.score_all(images);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double* row = all.data() + i * classes;
    const double peak = *std::max_element(row, row + classes);
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(row[c] - peak);
    out[i] = std::exp(row[class_index] - peak) / denom;
  }
  return out;
}

// Walks the saliency order from `start`, copying pixels from `source` into
// a running image, and scores one snapshot per step.
MetricCurve run_curve(CurveKind kind, Image current, const Image& source, const SaliencyMap& sm,
                      Scorer& scorer, std::size_t class_index, const MetricConfig& cfg) {
  cfg.validate();
  if (sm.height != source.height() || sm.width != source.width() ||
      sm.values.size() != source.shape().pixels()) {
    throw Error(ErrorKind::kShapeMismatch, "saliency map and image sizes differ");
  }
  const auto order = saliency_order(sm);
  const std::size_t pixels = order.size();
  const std::size_t steps = static_cast<std::size_t>(cfg.steps);
  const int channels = source.channels();
  const ScoreTransform transform = transform_for(scorer);

  MetricCurve curve;
  curve.kind = kind;
  curve.xs.resize(steps + 1);
  curve.ys.reserve(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) curve.xs[t] = static_cast<double>(t) / static_cast<double>(steps);

  std::size_t applied = 0;
  std::vector<Image> batch;
  batch.reserve(cfg.batch_size);
  auto flush = [&] {
    if (batch.empty()) return;
    const auto ys = transformed_scores(scorer, batch, class_index, transform);
    curve.ys.insert(curve.ys.end(), ys.begin(), ys.end());
    batch.clear();
  };
  auto src = source.data();
  auto dst = current.data();
  for (std::size_t t = 0; t <= steps; ++t) {
    const std::size_t target = t * pixels / steps;
    for (; applied < target; ++applied) {
      const std::size_t p = order[applied];
      for (int c = 0; c < channels; ++c) dst[p * channels + c] = src[p * channels + c];
    }
    batch.push_back(current);
    if (batch.size() == cfg.batch_size) flush();
  }
  flush();
  return curve;
}

void write_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

const char* to_string(ScoreTransform t) {
  return t == ScoreTransform::kSoftmax ? "softmax" : "logistic";
}

ScoreTransform transform_for(const Scorer& scorer) {
  return scorer.num_classes() ? ScoreTransform::kSoftmax : ScoreTransform::kLogistic;
}

void MetricConfig::validate() const {
  if (steps < 2) throw Error(ErrorKind::kInvalidArgument, "metric curves need at least 2 steps");
  if (batch_size < 1) throw Error(ErrorKind::kInvalidArgument, "batch size must be positive");
  gaussian_taps(blur_sigma, blur_kernel);
}

std::vector<std::size_t> saliency_order(const SaliencyMap& sm) {
  std::vector<std::size_t> order(sm.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sm.values[a] > sm.values[b]; });
  return order;
}

MetricCurve deletion_curve(const Image& image, const SaliencyMap& sm, Scorer& scorer,
                           std::size_t class_index, const MetricConfig& cfg) {
  return run_curve(CurveKind::kDeletion, image, Image(image.shape(), 0.0f), sm, scorer, class_index,
                   cfg);
}

MetricCurve insertion_curve(const Image& image, const SaliencyMap& sm, Scorer& scorer,
                            std::size_t class_index, const MetricConfig& cfg) {
  cfg.validate();
  Image blurred = parallel::gaussian_blur(image, cfg.blur_sigma, cfg.blur_kernel);
  return run_curve(CurveKind::kInsertion, std::move(blurred), image, sm, scorer, class_index, cfg);
}

double auc(const MetricCurve& curve) {
  if (curve.xs.size() != curve.ys.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "curve xs and ys differ in length");
  }
  // Summed exactly and rounded once, so linear and constant curves give
  // exact areas regardless of how the xs were rounded.
  cpp_rational area = 0;
  for (std::size_t i = 1; i < curve.xs.size(); ++i) {
    const cpp_rational dx = cpp_rational(curve.xs[i]) - cpp_rational(curve.xs[i - 1]);
    area += dx * (cpp_rational(curve.ys[i - 1]) + cpp_rational(curve.ys[i]));
  }
  area /= 2;
  return static_cast<double>(area);
}

EvalReport diff_auc(const Image& image, const SaliencyMap& sm, Scorer& scorer,
                    std::size_t class_index, const MetricConfig& cfg) {
  EvalReport report;
  report.transform = transform_for(scorer);
  report.insertion = insertion_curve(image, sm, scorer, class_index, cfg);
  report.deletion = deletion_curve(image, sm, scorer, class_index, cfg);
  report.auc_insertion = auc(report.insertion);
  report.auc_deletion = auc(report.deletion);
  report.diff_auc = 100.0 * (report.auc_insertion - report.auc_deletion);
  return report;
}

void write_curve_csv(const std::filesystem::path& path, const MetricCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "x,y\n";
  for (std::size_t i = 0; i < curve.xs.size(); ++i) {
    write_double(out, curve.xs[i]);
    out << ',';
    write_double(out, curve.ys[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

void write_report(const std::filesystem::path& path, const EvalReport& report,
                  const MetricConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  auto kv = [&](const char* key, double v) {
    out << key << '=';
    write_double(out, v);
    out << '\n';
  };
  kv("auc_insertion", report.auc_insertion);
  kv("auc_deletion", report.auc_deletion);
  kv("diff_auc", report.diff_auc);
  out << "score_transform=" << to_string(report.transform) << '\n';
  out << "steps=" << cfg.steps << '\n';
  kv("blur_sigma", cfg.blur_sigma);
  out << "blur_kernel=" << cfg.blur_kernel << '\n';
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace decam
