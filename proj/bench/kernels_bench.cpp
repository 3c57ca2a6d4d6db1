#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "decam/de_core.hpp"
#include "decam/kernels.hpp"

namespace {

using namespace decam;

std::vector<Individual> population(std::size_t n, int side) {
  Rng rng(5);
  std::vector<Individual> pop;
  for (std::size_t i = 0; i < n; ++i) pop.push_back(random_individual(10, side, side, rng));
  return pop;
}

Image noise(int side) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image img(ImageShape{side, side, 3});
  for (float& v : img.data()) v = u(rng);
  return img;
}

template <auto Fn>
void BM_Rasterize(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto pop = population(200, side);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(pop, side, side));
  state.SetItemsProcessed(state.iterations() * 200);
}

template <auto Fn>
void BM_ApplyMasks(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto masks = serial::rasterize_all(population(64, side), side, side);
  const Image img = noise(side);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(img, masks));
  state.SetItemsProcessed(state.iterations() * 64);
}

template <auto Fn>
void BM_Coverage(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto masks = serial::rasterize_all(population(200, side), side, side);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(masks));
}

template <auto Fn>
void BM_Blur(benchmark::State& state) {
  const Image img = noise(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(img, 5.0, 11));
}

}  // namespace

BENCHMARK(BM_Rasterize<serial::rasterize_all>)->Name("rasterize_all/serial")->Arg(64)->Arg(224);
BENCHMARK(BM_Rasterize<parallel::rasterize_all>)->Name("rasterize_all/parallel")->Arg(64)->Arg(224);
BENCHMARK(BM_ApplyMasks<serial::apply_masks>)->Name("apply_masks/serial")->Arg(64)->Arg(224);
BENCHMARK(BM_ApplyMasks<parallel::apply_masks>)->Name("apply_masks/parallel")->Arg(64)->Arg(224);
BENCHMARK(BM_Coverage<serial::coverage_counts>)->Name("coverage_counts/serial")->Arg(64)->Arg(224);
BENCHMARK(BM_Coverage<parallel::coverage_counts>)->Name("coverage_counts/parallel")->Arg(64)->Arg(224);
BENCHMARK(BM_Blur<serial::gaussian_blur>)->Name("gaussian_blur/serial")->Arg(64)->Arg(224);
BENCHMARK(BM_Blur<parallel::gaussian_blur>)->Name("gaussian_blur/parallel")->Arg(64)->Arg(224);

BENCHMARK_MAIN();
