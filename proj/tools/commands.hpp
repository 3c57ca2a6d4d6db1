#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "decam/de_core.hpp"
#include "decam/error.hpp"
#include "decam/image.hpp"
#include "decam/metrics.hpp"
#include "decam/scorer.hpp"

namespace decam::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitScorer = 2,
  kExitDegenerate = 3,
};

int exit_code_for(ErrorKind kind);

struct ScorerOptions {
  std::string spec;  // disc:..., twoblob:..., bridge:<cmd>; empty falls back to DECAM_BRIDGE_CMD
  double bridge_timeout_s = 60.0;
  int bridge_procs = 1;
};

struct ResolvedScorer {
  std::unique_ptr<Scorer> scorer;
  bool is_bridge = false;
};

/// Builds the scorer named by `opts` for `image`. Throws kInvalidArgument
/// on a malformed spec.
ResolvedScorer resolve_scorer(const ScorerOptions& opts, const Image& image);

struct ExplainOptions {
  std::filesystem::path image;
  std::size_t class_index = 0;
  ScorerOptions scorer;
  DEConfig de;
  bool alpha_given = false;
  std::filesystem::path out_dir = ".";
  bool overlay = false;
  bool evaluate = false;
  MetricConfig metrics;
  int jobs = 0;
  bool quiet = false;
};

struct EvaluateOptions {
  std::filesystem::path image;
  std::filesystem::path saliency;
  std::size_t class_index = 0;
  ScorerOptions scorer;
  MetricConfig metrics;
  std::filesystem::path out_dir = ".";
  int jobs = 0;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  ScorerOptions scorer;  // only bridges are exercised
  int jobs = 0;
};

int cmd_explain(const ExplainOptions& opts);
int cmd_evaluate(const EvaluateOptions& opts);
int cmd_selftest(const SelftestOptions& opts);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace decam::cli
