#include "commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>
#include <vector>

#include "decam/aggregation.hpp"
#include "decam/bridge.hpp"
#include "decam/kernels.hpp"
#include "decam/saliency_io.hpp"

namespace decam::cli {
namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& spec) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') {
      throw Error(ErrorKind::kInvalidArgument, "bad number '" + item + "' in scorer '" + spec + "'");
    }
    values.push_back(v);
  }
  if (values.size() != count) {
    throw Error(ErrorKind::kInvalidArgument, "scorer '" + spec + "' needs " + std::to_string(count) +
                                                 " comma-separated numbers");
  }
  return values;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void report_error(const Error& e) {
  std::cerr << "decam: " << to_string(e.kind()) << ": " << e.what() << '\n';
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "generation,mean_fitness,max_fitness,replacements\n";
  out << 0 << ',' << fmt(trace.initial.mean_fitness) << ',' << fmt(trace.initial.max_fitness) << ",0\n";
  for (std::size_t g = 0; g < trace.generations.size(); ++g) {
    const auto& s = trace.generations[g];
    out << g + 1 << ',' << fmt(s.mean_fitness) << ',' << fmt(s.max_fitness) << ',' << s.replacements << '\n';
  }
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kScorerUnavailable:
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kNonFiniteOutput:
    case ErrorKind::kDegenerateOracle:
      return kExitScorer;
    case ErrorKind::kDegenerateSaliency:
    case ErrorKind::kEmptyPopulation:
      return kExitDegenerate;
    default:
      return kExitUsage;
  }
}

ResolvedScorer resolve_scorer(const ScorerOptions& opts, const Image& image) {
  std::string spec = opts.spec;
  if (spec.empty()) {
    if (const char* env = std::getenv("DECAM_BRIDGE_CMD"); env && *env) {
      spec = std::string("bridge:") + env;
    } else {
      throw Error(ErrorKind::kInvalidArgument, "no scorer given (use --scorer or DECAM_BRIDGE_CMD)");
    }
  }
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "disc") {
    const auto v = parse_numbers(rest, 3, spec);
    return {make_disc_oracle(image, Disc{v[0], v[1], v[2]}), false};
  }
  if (kind == "twoblob") {
    const auto v = parse_numbers(rest, 6, spec);
    return {make_two_blob_oracle(image, Disc{v[0], v[1], v[2]}, Disc{v[3], v[4], v[5]}), false};
  }
  if (kind == "bridge") {
    if (rest.empty()) throw Error(ErrorKind::kInvalidArgument, "bridge scorer needs a command");
    if (opts.bridge_procs < 1) throw Error(ErrorKind::kInvalidArgument, "--bridge-procs must be >= 1");
    const auto timeout = std::chrono::milliseconds(static_cast<long long>(opts.bridge_timeout_s * 1000.0));
    if (opts.bridge_procs == 1) {
      return {std::make_unique<BridgeScorer>(BridgeOptions{rest, timeout}), true};
    }
    std::vector<std::unique_ptr<Scorer>> workers;
    for (int i = 0; i < opts.bridge_procs; ++i) {
      workers.push_back(std::make_unique<BridgeScorer>(BridgeOptions{rest, timeout}));
    }
    return {make_pooled_scorer(std::move(workers)), true};
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown scorer '" + spec + "'");
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  static const char* kHex = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

int cmd_explain(const ExplainOptions& opts) {
  try {
    set_max_jobs(opts.jobs);
    const std::string started = utc_now();
    const Image image = read_png(opts.image);
    validate_image(image);
    auto resolved = resolve_scorer(opts.scorer, image);
    Scorer& scorer = *resolved.scorer;
    if (resolved.is_bridge && !opts.alpha_given) {
      std::cerr << "decam: warning: --alpha not set; the default " << opts.de.alpha
                << " assumes logits in [0, 1]. Pick alpha on the scale of this model's logits.\n";
    }

    std::filesystem::create_directories(opts.out_dir);
    EvolveResult run;
    try {
      run = evolve(image, scorer, opts.class_index, opts.de,
                   [&](const Population& pop, const RunTrace& trace) {
                     if (opts.quiet || pop.generation % 20 != 0) return;
                     const auto& s = pop.generation == 0 ? trace.initial : trace.generations.back();
                     std::cerr << "generation " << pop.generation << ": mean " << s.mean_fitness
                               << " max " << s.max_fitness << '\n';
                   });
    } catch (const EvolveAborted& e) {
      write_trace_csv(opts.out_dir / "trace.csv", e.trace());
      throw;
    }

    const auto candidates = select_candidates(run.population);
    const SaliencyMap sm = aggregate(candidates, image.height(), image.width());

    const auto sm_png = opts.out_dir / "saliency.png";
    const auto sm_raw = opts.out_dir / "saliency.sm";
    const auto overlay = opts.out_dir / "overlay.png";
    const auto manifest_path = opts.out_dir / "manifest.txt";
    write_saliency_png(sm_png, sm);
    write_saliency_raw(sm_raw, sm);
    if (opts.overlay) write_overlay_png(overlay, image, sm);
    write_trace_csv(opts.out_dir / "trace.csv", run.trace);

    std::optional<EvalReport> report;
    if (opts.evaluate) {
      report = diff_auc(image, sm, scorer, opts.class_index, opts.metrics);
      write_curve_csv(opts.out_dir / "insertion.csv", report->insertion);
      write_curve_csv(opts.out_dir / "deletion.csv", report->deletion);
      write_report(opts.out_dir / "report.txt", *report, opts.metrics);
    }

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& ind : run.population.individuals) best = std::max(best, *ind.fitness);

    std::ofstream m(manifest_path);
    if (!m) throw Error(ErrorKind::kIo, "cannot write " + manifest_path.string());
    m << "command=explain\n"
      << "image=" << opts.image.string() << '\n'
      << "image_sha256=" << sha256_file(opts.image) << '\n'
      << "image_shape=" << image.height() << 'x' << image.width() << 'x' << image.channels() << '\n'
      << "scorer=" << scorer.identity() << '\n'
      << "class_index=" << opts.class_index << '\n'
      << "seed=" << opts.de.seed << '\n'
      << "cr=" << fmt(opts.de.cr) << '\n'
      << "f=" << fmt(opts.de.f) << '\n'
      << "k=" << opts.de.k << '\n'
      << "max_iter=" << opts.de.max_iter << '\n'
      << "population=" << opts.de.population << '\n'
      << "alpha=" << fmt(opts.de.alpha) << '\n'
      << "alpha_source=" << (opts.alpha_given ? "user" : "default") << '\n'
      << "batch_size=" << opts.de.batch_size << '\n'
      << "jobs=" << opts.jobs << '\n'
      << "started_utc=" << started << '\n'
      << "finished_utc=" << utc_now() << '\n'
      << "wall_seconds=" << fmt(run.trace.wall_seconds) << '\n'
      << "scorer_calls=" << run.trace.scorer_calls << '\n'
      << "evaluations=" << run.trace.evaluations << '\n'
      << "best_fitness=" << fmt(best) << '\n'
      << "candidates=" << candidates.size() << '\n'
      << "saliency_png=" << sm_png.string() << '\n'
      << "saliency_raw=" << sm_raw.string() << '\n';
    if (opts.overlay) m << "overlay_png=" << overlay.string() << '\n';
    if (report) {
      m << "diff_auc=" << fmt(report->diff_auc) << '\n'
        << "score_transform=" << to_string(report->transform) << '\n';
    }

    if (!opts.quiet) {
      std::cout << "best fitness " << best << ", " << candidates.size() << " candidates, "
                << run.trace.evaluations << " evaluations in " << run.trace.wall_seconds << " s\n";
      if (report) std::cout << "DiffAUC " << report->diff_auc << '\n';
      std::cout << "wrote " << sm_png.string() << " and " << sm_raw.string() << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    report_error(e);
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "decam: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_evaluate(const EvaluateOptions& opts) {
  try {
    set_max_jobs(opts.jobs);
    const Image image = read_png(opts.image);
    validate_image(image);
    const SaliencyMap sm = read_saliency_raw(opts.saliency);
    if (sm.height != image.height() || sm.width != image.width()) {
      throw Error(ErrorKind::kFormat, "saliency map is " + std::to_string(sm.height) + "x" +
                                          std::to_string(sm.width) + " but the image is " +
                                          std::to_string(image.height()) + "x" +
                                          std::to_string(image.width()));
    }
    auto resolved = resolve_scorer(opts.scorer, image);
    const EvalReport report = diff_auc(image, sm, *resolved.scorer, opts.class_index, opts.metrics);
    std::filesystem::create_directories(opts.out_dir);
    write_curve_csv(opts.out_dir / "insertion.csv", report.insertion);
    write_curve_csv(opts.out_dir / "deletion.csv", report.deletion);
    write_report(opts.out_dir / "report.txt", report, opts.metrics);
    std::cout << "AUC insertion " << report.auc_insertion << "\nAUC deletion " << report.auc_deletion
              << "\nDiffAUC " << report.diff_auc << '\n';
    return kExitOk;
  } catch (const Error& e) {
    report_error(e);
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "decam: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace decam::cli
