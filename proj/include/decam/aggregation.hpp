#pragma once

#include <span>
#include <vector>

#include "decam/de_core.hpp"
#include "decam/mask_genome.hpp"

namespace decam {

/// Grayscale H x W map in [0, 1], row-major.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

/// Individuals whose fitness exceeds 2/3 of the population mean. When the
/// mean is not positive that threshold would admit the worse tail, so the
/// rule becomes fitness >= mean. Throws kEmptyPopulation on an empty
/// population and kInvalidArgument if any fitness is missing.
std::vector<Individual> select_candidates(const Population& pop);

/// Coverage count of the candidates' masks divided by its maximum.
/// Throws kDegenerateSaliency if every mask is empty.
SaliencyMap aggregate(std::span<const Individual> candidates, int height, int width);

}  // namespace decam
