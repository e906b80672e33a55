#include <benchmark/benchmark.h>

#include "sheafss/forge.hpp"
#include "sheafss/gross.hpp"
#include "sheafss/instance.hpp"

using namespace sheafss;

namespace {

const Instance& torus() {
  static const Instance inst = load_instance(std::string(SHEAFSS_DATA_DIR) + "/torus.json");
  return inst;
}

void BM_InjectiveResolutionTorus(benchmark::State& state) {
  const SheafPtr k = torus().sheaf("k");
  const std::size_t len = default_resolution_length(*k->poset());
  for (auto _ : state) benchmark::DoNotOptimize(injective_resolution(k, len));
}
BENCHMARK(BM_InjectiveResolutionTorus)->Unit(benchmark::kMillisecond);

void BM_LerayTorus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(leray_ss(torus().map("pr1"), torus().sheaf("k")));
}
BENCHMARK(BM_LerayTorus)->Unit(benchmark::kMillisecond);

void BM_CoboundaryTorus(benchmark::State& state) {
  const SheafSequence& s = *torus().sequence("inj").sheaves;
  for (auto _ : state) benchmark::DoNotOptimize(leray_delta(torus().map("pr1"), s.iota, s.pi));
}
BENCHMARK(BM_CoboundaryTorus)->Unit(benchmark::kMillisecond);

void BM_CETripleGenerated(benchmark::State& state) {
  GenConfig cfg;
  cfg.seed = 11;
  cfg.max_elements = static_cast<std::size_t>(state.range(0));
  const auto p = gen_poset(cfg);
  const SESOfComplexes s = gen_ses_complexes(cfg, p);
  for (auto _ : state) benchmark::DoNotOptimize(build_ce_triple(s, default_ce_depth(*p)));
}
BENCHMARK(BM_CETripleGenerated)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

}  // namespace
