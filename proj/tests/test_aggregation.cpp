#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "decam/aggregation.hpp"
#include "decam/error.hpp"
#include "test_oracles.hpp"

namespace decam {
namespace {

Population with_fitness(std::initializer_list<double> values) {
  Population pop;
  Rng rng(1);
  for (double v : values) {
    Individual ind = random_individual(2, 24, 24, rng);
    ind.fitness = v;
    pop.individuals.push_back(ind);
  }
  return pop;
}

std::vector<double> fitnesses(const std::vector<Individual>& inds) {
  std::vector<double> out;
  for (const auto& i : inds) out.push_back(*i.fitness);
  return out;
}

TEST(SelectCandidates, TwoThirdsOfPositiveMean) {
  EXPECT_EQ(fitnesses(select_candidates(with_fitness({3, 3, 3}))), (std::vector<double>{3, 3, 3}));
  EXPECT_EQ(fitnesses(select_candidates(with_fitness({0.9, 0.6, 0.3}))), (std::vector<double>{0.9, 0.6}));
}

TEST(SelectCandidates, NonPositiveMeanFallsBackToAboveMean) {
  EXPECT_EQ(fitnesses(select_candidates(with_fitness({-1, -2, -3}))), (std::vector<double>{-1, -2}));
  EXPECT_EQ(fitnesses(select_candidates(with_fitness({1, -1}))), (std::vector<double>{1}));  // mean 0
  EXPECT_EQ(fitnesses(select_candidates(with_fitness({-0.5, -0.5}))), (std::vector<double>{-0.5, -0.5}));
}

TEST(SelectCandidates, BestAlwaysQualifies) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Population pop = with_fitness({0, 0, 0, 0, 0, 0, 0});
    for (auto& ind : pop.individuals) ind.fitness = n(rng) + (trial % 3 - 1) * 3.0;
    const double best = *std::max_element(pop.individuals.begin(), pop.individuals.end(),
                                          [](const auto& a, const auto& b) { return *a.fitness < *b.fitness; })
                             ->fitness;
    const auto picked = fitnesses(select_candidates(pop));
    ASSERT_FALSE(picked.empty());
    EXPECT_NE(std::find(picked.begin(), picked.end(), best), picked.end());
  }
}

TEST(SelectCandidates, Errors) {
  try {
    select_candidates(Population{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyPopulation);
  }
  Population pop = with_fitness({1.0, 2.0});
  pop.individuals[1].fitness.reset();
  EXPECT_THROW(select_candidates(pop), Error);
}

TEST(Aggregate, SingleCandidateIsItsMask) {
  Rng rng(2);
  const std::vector<Individual> one{random_individual(4, 30, 30, rng)};
  const SaliencyMap sm = aggregate(one, 30, 30);
  const BinaryMask m = rasterize(one[0], 30, 30);
  for (std::size_t p = 0; p < m.size(); ++p) EXPECT_EQ(sm.values[p], m.bits()[p]);
}

TEST(Aggregate, IdenticalCandidatesGiveTheirMask) {
  Rng rng(3);
  const Individual ind = random_individual(4, 30, 30, rng);
  const std::vector<Individual> two{ind, ind};
  EXPECT_EQ(aggregate(two, 30, 30).values, aggregate(std::vector<Individual>{ind}, 30, 30).values);
}

TEST(Aggregate, MatchesBruteForceCoverageCounter) {
  Rng rng(4);
  std::vector<Individual> cands;
  for (int i = 0; i < 100; ++i) cands.push_back(random_individual(3, 24, 24, rng));
  std::vector<double> counts(24 * 24, 0.0);
  for (const auto& c : cands) {
    const auto bits = testing::brute_force_mask(c.genes, 24, 24);
    for (std::size_t p = 0; p < bits.size(); ++p) counts[p] += bits[p];
  }
  const double peak = *std::max_element(counts.begin(), counts.end());
  const SaliencyMap sm = aggregate(cands, 24, 24);
  for (std::size_t p = 0; p < counts.size(); ++p) EXPECT_NEAR(sm.values[p], counts[p] / peak, 1e-12);
  EXPECT_EQ(*std::max_element(sm.values.begin(), sm.values.end()), 1.0);
}

TEST(Aggregate, OrderFreeAndMonotone) {
  Rng rng(5);
  std::vector<Individual> cands;
  for (int i = 0; i < 40; ++i) cands.push_back(random_individual(3, 24, 24, rng));
  auto shuffled = cands;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(1));
  const SaliencyMap a = aggregate(cands, 24, 24);
  EXPECT_EQ(a.values, aggregate(shuffled, 24, 24).values);

  // A pixel covered by a superset of candidates scores at least as high.
  const auto masks = [&] {
    std::vector<BinaryMask> m;
    for (const auto& c : cands) m.push_back(rasterize(c, 24, 24));
    return m;
  }();
  for (std::size_t p = 0; p < a.values.size(); ++p) {
    for (std::size_t q = 0; q < a.values.size(); ++q) {
      bool superset = true;
      for (const auto& m : masks) superset = superset && (!m.bits()[q] || m.bits()[p]);
      if (superset) ASSERT_GE(a.values[p], a.values[q]);
    }
  }
}

TEST(Aggregate, DegenerateInputs) {
  try {
    aggregate(std::vector<Individual>{}, 24, 24);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateSaliency);
  }
  Individual empty;  // no ellipses: empty mask
  try {
    aggregate(std::vector<Individual>{empty}, 24, 24);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateSaliency);
  }
}

}  // namespace
}  // namespace decam
