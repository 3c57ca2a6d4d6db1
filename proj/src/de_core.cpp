#include "decam/de_core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "decam/kernels.hpp"

namespace decam {
namespace {

GenerationStats stats_of(const std::vector<Individual>& individuals) {
  GenerationStats s;
  s.max_fitness = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& ind : individuals) {
    sum += *ind.fitness;
    s.max_fitness = std::max(s.max_fitness, *ind.fitness);
  }
  s.mean_fitness = sum / static_cast<double>(individuals.size());
  return s;
}

void score_slice(std::span<Individual> slice, const std::vector<BinaryMask>& masks,
                 const std::vector<Image>& images, Scorer& scorer, std::size_t class_index,
                 double alpha) {
  const auto logits = scorer.score_batch({images, class_index}).logits;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    slice[i].fitness = logits[i] - alpha * mask_fraction(masks[i]);
  }
}

}  // namespace

void DEConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (!(cr >= 0.0 && cr <= 1.0)) fail("CR must lie in [0, 1]");
  if (!(f > 0.0) || !std::isfinite(f)) fail("F must be positive");
  if (k < 1) fail("K must be at least 1");
  if (max_iter < 1) fail("MaxIter must be at least 1");
  if (population < 4) fail("population size must be at least 4");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be non-negative");
  if (batch_size < 1) fail("batch size must be at least 1");
}

double mask_fitness(const BinaryMask& mask, const Image& image, Scorer& scorer,
                    std::size_t class_index, double alpha) {
  if (mask.height() != image.height() || mask.width() != image.width()) {
    throw Error(ErrorKind::kShapeMismatch, "mask and image sizes differ");
  }
  const auto masked = serial::apply_masks(image, std::span(&mask, 1));
  const double logit = scorer.score_batch({masked, class_index}).logits.front();
  return logit - alpha * mask_fraction(mask);
}

double fitness(const Individual& ind, const Image& image, Scorer& scorer, std::size_t class_index,
               double alpha) {
  return mask_fitness(rasterize(ind, image.height(), image.width()), image, scorer, class_index, alpha);
}

std::size_t evaluate(std::span<Individual> individuals, const Image& image, Scorer& scorer,
                     std::size_t class_index, double alpha, std::size_t batch_size) {
  if (batch_size == 0) throw Error(ErrorKind::kInvalidArgument, "batch size must be positive");
  const std::size_t n = individuals.size();
  const std::size_t batches = (n + batch_size - 1) / batch_size;
  const int h = image.height(), w = image.width();

  if (!scorer.concurrent() || batches < 2) {
    for (std::size_t b = 0; b < batches; ++b) {
      auto slice = individuals.subspan(b * batch_size, std::min(batch_size, n - b * batch_size));
      const auto masks = parallel::rasterize_all(slice, h, w);
      const auto images = parallel::apply_masks(image, masks);
      score_slice(slice, masks, images, scorer, class_index, alpha);
    }
    return batches;
  }

  // Batch-parallel: each batch is built serially inside its own thread and
  // results land at fixed indices, so the outcome matches the serial path.
  std::vector<std::exception_ptr> errors(batches);
  const auto nb = static_cast<std::ptrdiff_t>(batches);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    try {
      const std::size_t first = static_cast<std::size_t>(b) * batch_size;
      auto slice = individuals.subspan(first, std::min(batch_size, n - first));
      const auto masks = serial::rasterize_all(slice, h, w);
      const auto images = serial::apply_masks(image, masks);
      score_slice(slice, masks, images, scorer, class_index, alpha);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return batches;
}

std::vector<double> mutate_crossover(const Individual& x, const Individual& a, const Individual& b,
                                     const Individual& c, const DEConfig& cfg, Rng& rng) {
  const auto xs = flatten(x), as = flatten(a), bs = flatten(b), cs = flatten(c);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<double> trial(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    trial[i] = coin(rng) < cfg.cr ? as[i] + cfg.f * (bs[i] - cs[i]) : xs[i];
  }
  return trial;
}

Individual random_individual(std::size_t k, int height, int width, Rng& rng) {
  std::uniform_real_distribution<double> col(0.0, width - 1.0);
  std::uniform_real_distribution<double> row(0.0, height - 1.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::vector<double> raw;
  raw.reserve(k * EllipseGene::kFields);
  for (std::size_t e = 0; e < k; ++e) {
    const double x0 = col(rng), y0 = row(rng), x1 = col(rng), y1 = row(rng), r = angle(rng);
    raw.insert(raw.end(), {x0, y0, x1, y1, r});
  }
  return clip_genes(raw, k, height, width);
}

EvolveResult evolve(const Image& image, Scorer& scorer, std::size_t class_index, const DEConfig& cfg,
                    const GenerationObserver& observer) {
  cfg.validate();
  validate_image(image);
  const auto started = std::chrono::steady_clock::now();
  const int h = image.height(), w = image.width();
  const std::size_t n = cfg.population;

  Rng rng(cfg.seed);
  EvolveResult result;
  Population& pop = result.population;
  RunTrace& trace = result.trace;
  pop.individuals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pop.individuals.push_back(random_individual(cfg.k, h, w, rng));

  auto stamp = [&] {
    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };
  auto run_evaluation = [&](std::vector<Individual>& batch) {
    try {
      trace.scorer_calls += evaluate(batch, image, scorer, class_index, cfg.alpha, cfg.batch_size);
      trace.evaluations += batch.size();
    } catch (const Error& e) {
      stamp();
      throw EvolveAborted(e, trace);
    }
  };

  run_evaluation(pop.individuals);
  trace.initial = stats_of(pop.individuals);
  stamp();
  if (observer) observer(pop, trace);

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<Individual> trials(n);
  for (std::size_t gen = 1; gen <= cfg.max_iter; ++gen) {
    // Donors are drawn from the population as it stood at the start of the
    // generation; nothing is replaced until all trials are scored.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t a, b, c;
      do a = pick(rng); while (a == i);
      do b = pick(rng); while (b == i || b == a);
      do c = pick(rng); while (c == i || c == a || c == b);
      const auto raw = mutate_crossover(pop.individuals[i], pop.individuals[a], pop.individuals[b],
                                        pop.individuals[c], cfg, rng);
      trials[i] = clip_genes(raw, cfg.k, h, w);
    }
    run_evaluation(trials);

    std::size_t replaced = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (*trials[i].fitness > *pop.individuals[i].fitness) {
        pop.individuals[i] = trials[i];
        ++replaced;
      }
    }
    pop.generation = gen;
    GenerationStats s = stats_of(pop.individuals);
    s.replacements = replaced;
    trace.generations.push_back(s);
    stamp();
    if (observer) observer(pop, trace);
  }
  return result;
}

}  // namespace decam
