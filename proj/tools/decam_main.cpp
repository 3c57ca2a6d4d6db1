#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace {

void add_scorer_flags(CLI::App& cmd, decam::cli::ScorerOptions& opts) {
  cmd.add_option("--scorer", opts.spec,
                 "disc:ROW,COL,RADIUS | twoblob:R1,C1,RAD1,R2,C2,RAD2 | bridge:COMMAND "
                 "(default: DECAM_BRIDGE_CMD)");
  cmd.add_option("--bridge-timeout", opts.bridge_timeout_s, "Seconds per bridge call")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--bridge-procs", opts.bridge_procs, "Bridge processes to run in parallel")
      ->check(CLI::PositiveNumber);
}

void add_metric_flags(CLI::App& cmd, decam::MetricConfig& cfg) {
  cmd.add_option("--steps", cfg.steps, "Insertion/deletion steps")->check(CLI::Range(2, 1 << 20));
  cmd.add_option("--blur-sigma", cfg.blur_sigma, "Insertion baseline blur sigma")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--blur-kernel", cfg.blur_kernel, "Insertion baseline blur kernel side (odd)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace decam::cli;
  CLI::App app{"Black-box saliency maps by differential evolution over ellipse masks"};
  app.require_subcommand(1);

  ExplainOptions ex;
  auto* explain = app.add_subcommand("explain", "Compute a saliency map for one image");
  explain->add_option("--image", ex.image, "8-bit PNG, 1 or 3 channels")->required();
  explain->add_option("--class", ex.class_index, "Class index to explain");
  add_scorer_flags(*explain, ex.scorer);
  auto* alpha = explain->add_option("--alpha", ex.de.alpha, "Sparsity penalty weight");
  explain->add_option("--cr", ex.de.cr, "Crossover probability");
  explain->add_option("--f", ex.de.f, "Differential weight");
  explain->add_option("--k", ex.de.k, "Ellipses per individual");
  explain->add_option("--max-iter", ex.de.max_iter, "Generations");
  explain->add_option("--pop", ex.de.population, "Population size");
  explain->add_option("--seed", ex.de.seed, "RNG seed");
  explain->add_option("--batch-size", ex.de.batch_size, "Images per scorer call");
  explain->add_option("--out-dir", ex.out_dir, "Output directory");
  explain->add_flag("--overlay", ex.overlay, "Also write overlay.png");
  explain->add_flag("--evaluate", ex.evaluate, "Also run insertion/deletion metrics");
  add_metric_flags(*explain, ex.metrics);
  explain->add_option("--jobs", ex.jobs, "Worker threads (0 = all cores)");
  explain->add_flag("--quiet", ex.quiet, "Suppress progress output");

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Insertion/deletion AUC and DiffAUC of a saliency map");
  evaluate->add_option("--image", ev.image, "8-bit PNG, 1 or 3 channels")->required();
  evaluate->add_option("--sm", ev.saliency, "Raw saliency map (.sm)")->required();
  evaluate->add_option("--class", ev.class_index, "Class index");
  add_scorer_flags(*evaluate, ev.scorer);
  add_metric_flags(*evaluate, ev.metrics);
  evaluate->add_option("--batch-size", ev.metrics.batch_size, "Images per scorer call");
  evaluate->add_option("--out-dir", ev.out_dir, "Output directory");
  evaluate->add_option("--jobs", ev.jobs, "Worker threads (0 = all cores)");

  SelftestOptions st;
  auto* selftest = app.add_subcommand("selftest", "Run built-in consistency checks");
  selftest->add_option("--seed", st.seed, "RNG seed");
  add_scorer_flags(*selftest, st.scorer);
  selftest->add_option("--jobs", st.jobs, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*explain) {
    ex.alpha_given = alpha->count() > 0;
    ex.metrics.batch_size = ex.de.batch_size;
    return cmd_explain(ex);
  }
  if (*evaluate) return cmd_evaluate(ev);
  return cmd_selftest(st);
}
