#include <benchmark/benchmark.h>

#include "surfcert/builder.hpp"
#include "surfcert/model.hpp"
#include "surfcert/stallings.hpp"
#include "surfcert/words.hpp"

using namespace surfcert;

namespace {

CoreGraph image_rose(std::size_t n, int k, std::uint64_t seed) {
  return rose_of_words(sample_homomorphism({k, 2, n, seed}));
}

}  // namespace

static void BM_Fold(benchmark::State& state) {
  const CoreGraph rose = image_rose(static_cast<std::size_t>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fold(rose));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fold)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_FiberProduct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CoreGraph a = core(fold(image_rose(n, 2, 2)), false);
  const CoreGraph b = core(fold(image_rose(n, 2, 3)), false);
  for (auto _ : state) benchmark::DoNotOptimize(core(fiber_product(a, b), false));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FiberProduct)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_Malnormal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::array<CoreGraph, 2> zs{core(fold(image_rose(n, 2, 4)), false), core(fold(image_rose(n, 2, 5)), false)};
  for (auto _ : state) benchmark::DoNotOptimize(is_malnormal_family(zs));
}
BENCHMARK(BM_Malnormal)->RangeMultiplier(2)->Range(20, 320);

static void BM_Census(benchmark::State& state) {
  Rng rng(6);
  const std::array<CyclicWord, 1> chain{
      cyclic_reduce(sample_reduced_word(static_cast<std::size_t>(state.range(0)), 2, rng)).core};
  for (auto _ : state) benchmark::DoNotOptimize(census(chain, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Census)->RangeMultiplier(10)->Range(1000, 1000000);

static void BM_BuildFFolded(benchmark::State& state) {
  const auto spec = sample_graph_of_groups(SplittingKind::Amalgam, 1, 2, static_cast<std::size_t>(state.range(0)), 7);
  const CoreGraph z = image_core(spec.phi[0]).z;
  Chain chain;
  chain.rank = 2;
  chain.components = side_chain(spec, 0, default_chain());
  BuilderConfig config;
  config.seed = 7;
  config.forbid_annuli = true;
  for (auto _ : state) benchmark::DoNotOptimize(build_f_folded(chain, z, config));
}
BENCHMARK(BM_BuildFFolded)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Certificate(benchmark::State& state) {
  const auto kind = state.range(0) == 0 ? SplittingKind::Amalgam : SplittingKind::HNN;
  const auto spec = sample_graph_of_groups(kind, 1, 2, 200, 7);
  BuilderConfig config;
  config.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(build_certificate(spec, default_chain(), config));
}
BENCHMARK(BM_Certificate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
