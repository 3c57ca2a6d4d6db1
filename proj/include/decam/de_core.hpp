#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "decam/error.hpp"
#include "decam/image.hpp"
#include "decam/mask_genome.hpp"
#include "decam/scorer.hpp"

namespace decam {

struct DEConfig {
  double cr = 0.2;               // crossover probability
  double f = 0.8;                // differential weight
  std::size_t k = 10;            // ellipses per individual
  std::size_t max_iter = 200;    // generations
  std::size_t population = 200;  // N
  double alpha = 2.0;            // sparsity penalty weight
  std::uint64_t seed = 0;
  std::size_t batch_size = 64;   // images per scorer call

  // Throws kInvalidArgument on any out-of-range field.
  void validate() const;
};

using Rng = std::mt19937_64;

struct Population {
  std::vector<Individual> individuals;
  std::size_t generation = 0;
};

struct GenerationStats {
  double mean_fitness = 0.0;
  double max_fitness = 0.0;
  std::size_t replacements = 0;
};

struct RunTrace {
  GenerationStats initial;                  // after evaluating the initial population
  std::vector<GenerationStats> generations;  // one entry per completed generation
  std::size_t scorer_calls = 0;             // score_batch invocations
  std::size_t evaluations = 0;              // images scored
  double wall_seconds = 0.0;
};

struct EvolveResult {
  Population population;
  RunTrace trace;
};

/// Raised when the scorer fails mid-run; carries the trace up to the
/// failure.
class EvolveAborted : public Error {
 public:
  EvolveAborted(const Error& cause, RunTrace trace)
      : Error(cause.kind(), cause.what()), trace_(std::move(trace)) {}
  const RunTrace& trace() const { return trace_; }

 private:
  RunTrace trace_;
};

/// f(X ⊙ M) - alpha * |M| / (H * W).
double mask_fitness(const BinaryMask& mask, const Image& image, Scorer& scorer,
                    std::size_t class_index, double alpha);

/// mask_fitness of rasterize(ind).
double fitness(const Individual& ind, const Image& image, Scorer& scorer,
               std::size_t class_index, double alpha);

/// Scores every individual in batches of `batch_size`, writing the cached
/// fitness. Masks are built in parallel; batches go out concurrently only
/// when the scorer allows it. Returns the number of scorer calls made.
std::size_t evaluate(std::span<Individual> individuals, const Image& image, Scorer& scorer,
                     std::size_t class_index, double alpha, std::size_t batch_size);

/// Trial vector for target x: each gene, in ellipse-major field-minor
/// order, is a + F (b - c) with probability CR and x otherwise. One uniform
/// draw per gene. The result is not clipped.
std::vector<double> mutate_crossover(const Individual& x, const Individual& a, const Individual& b,
                                     const Individual& c, const DEConfig& cfg, Rng& rng);

/// Uniform random genes over the image, clipped.
Individual random_individual(std::size_t k, int height, int width, Rng& rng);

/// Called after the initial evaluation (generation 0) and after every
/// generation.
using GenerationObserver = std::function<void(const Population&, const RunTrace&)>;

/// Runs cfg.max_iter generations of DE/rand/1/bin without the forced
/// crossover gene. Donors come from the generation-start snapshot, all N
/// trials are evaluated together, then selection keeps a trial only when
/// it is strictly fitter than its target.
EvolveResult evolve(const Image& image, Scorer& scorer, std::size_t class_index, const DEConfig& cfg,
                    const GenerationObserver& observer = {});

}  // namespace decam
