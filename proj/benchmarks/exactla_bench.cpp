#include <benchmark/benchmark.h>

#include "sheafss/forge.hpp"

using namespace sheafss;

namespace {

Matrix random_matrix(std::size_t n, const Field& field) {
  GenConfig cfg;
  cfg.seed = n;
  cfg.field = field;
  return Forge(cfg).matrix(n, n);
}

void BM_RankRational(benchmark::State& state) {
  const Matrix m = random_matrix(static_cast<std::size_t>(state.range(0)), Field{});
  for (auto _ : state) benchmark::DoNotOptimize(rank(m));
}
BENCHMARK(BM_RankRational)->RangeMultiplier(2)->Range(4, 64);

void BM_RankPrime(benchmark::State& state) {
  const Matrix m = random_matrix(static_cast<std::size_t>(state.range(0)), Field::prime(32003));
  for (auto _ : state) benchmark::DoNotOptimize(rank(m));
}
BENCHMARK(BM_RankPrime)->RangeMultiplier(2)->Range(4, 64);

void BM_KernelBasis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix m = random_matrix(n, Field{}).rows_range(0, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_basis(m));
}
BENCHMARK(BM_KernelBasis)->RangeMultiplier(2)->Range(4, 64);

}  // namespace
