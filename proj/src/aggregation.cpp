#include "decam/aggregation.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "decam/error.hpp"
#include "decam/kernels.hpp"

namespace decam {

std::vector<Individual> select_candidates(const Population& pop) {
  const auto& inds = pop.individuals;
  if (inds.empty()) throw Error(ErrorKind::kEmptyPopulation, "cannot select from an empty population");
  double sum = 0.0;
  for (std::size_t i = 0; i < inds.size(); ++i) {
    if (!inds[i].fitness) {
      throw Error(ErrorKind::kInvalidArgument,
                  "individual " + std::to_string(i) + " has not been evaluated");
    }
    sum += *inds[i].fitness;
  }
  const double mean = sum / static_cast<double>(inds.size());

  std::vector<Individual> out;
  if (mean > 0.0) {
    const double threshold = 2.0 * mean / 3.0;
    std::copy_if(inds.begin(), inds.end(), std::back_inserter(out),
                 [&](const Individual& ind) { return *ind.fitness > threshold; });
  } else {
    // Two thirds of a non-positive mean sits above the mean and would let
    // the worse half through; keep the at-or-above-average tail instead.
    std::copy_if(inds.begin(), inds.end(), std::back_inserter(out),
                 [&](const Individual& ind) { return *ind.fitness >= mean; });
  }
  return out;
}

SaliencyMap aggregate(std::span<const Individual> candidates, int height, int width) {
  if (candidates.empty()) {
    throw Error(ErrorKind::kDegenerateSaliency, "no candidates to aggregate");
  }
  const auto masks = parallel::rasterize_all(candidates, height, width);
  const auto counts = parallel::coverage_counts(masks);
  const std::uint32_t peak = *std::max_element(counts.begin(), counts.end());
  if (peak == 0) {
    throw Error(ErrorKind::kDegenerateSaliency, "every candidate mask is empty");
  }
  SaliencyMap sm{height, width, std::vector<double>(counts.size())};
  for (std::size_t p = 0; p < counts.size(); ++p) {
    sm.values[p] = static_cast<double>(counts[p]) / static_cast<double>(peak);
  }
  return sm;
}

}  // namespace decam
