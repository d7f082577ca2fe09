#include <benchmark/benchmark.h>

#include "bvgraded/corpus.hpp"
#include "bvgraded/identities.hpp"

using namespace bvg;

namespace {

Corpus& corpus() {
  static Corpus c(BVGRADED_CORPUS_DIR);
  return c;
}

void BM_MasterEquation(benchmark::State& state) {
  const char* names[] = {"bf", "gr", "pp"};
  const Theory& t = corpus().theory(names[state.range(0)]).theory;
  for (auto _ : state) benchmark::DoNotOptimize(checkCME(t, LambdaMode::Formal));
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_MasterEquation)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_ExtractQ(benchmark::State& state) {
  const Theory& t = corpus().theory("gr").theory;
  for (auto _ : state) benchmark::DoNotOptimize(extractQ(t));
}
BENCHMARK(BM_ExtractQ)->Unit(benchmark::kMillisecond);

void BM_DeriveG(benchmark::State& state) {
  const BoundGenFun g = corpus().bindGenFun("G");
  for (auto _ : state) benchmark::DoNotOptimize(deriveTransformation(g.g));
}
BENCHMARK(BM_DeriveG)->Unit(benchmark::kMillisecond);

void BM_PullbackG(benchmark::State& state) {
  const BoundGenFun g = corpus().bindGenFun("G");
  const TransformationMap map = deriveTransformation(g.g);
  const Theory& pp = corpus().theory("pp").theory;
  const Theory& bf = corpus().theory("bf").theory;
  for (auto _ : state) benchmark::DoNotOptimize(pullbackAction(map, pp, bf, LambdaMode::Zero));
}
BENCHMARK(BM_PullbackG)->Unit(benchmark::kMillisecond);

void BM_ComposeGF(benchmark::State& state) {
  const BoundGenFun g = corpus().bindGenFun("G");
  const BoundGenFun f = corpus().bindGenFun("F");
  for (auto _ : state) benchmark::DoNotOptimize(composeGenerating(g.g, f.g));
}
BENCHMARK(BM_ComposeGF)->Unit(benchmark::kMillisecond);

void BM_TopFormIdentities(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(checkTopFormIdentities(1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TopFormIdentities)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
