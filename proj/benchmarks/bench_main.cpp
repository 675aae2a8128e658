#include <benchmark/benchmark.h>

#include "sociallearn/dynamics.hpp"
#include "sociallearn/efficiency.hpp"
#include "sociallearn/extraction.hpp"

using namespace sociallearn;

namespace {

const BeliefPair& shared_pair() {
  static const BeliefPair p = construct_informative_pair({0.3, 0.5});
  return p;
}

void BM_Construct(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(construct_informative_pair({0.3, 0.5}, {.truncation = t}));
  }
}
BENCHMARK(BM_Construct)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(shared_pair(), State::H, horizon, seed++));
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000);

void BM_Enumerate(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(shared_pair(), depth));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{2} << depth));
}
BENCHMARK(BM_Enumerate)->DenseRange(8, 16, 4)->Unit(benchmark::kMicrosecond);

void BM_Extract(benchmark::State& state) {
  const auto tree = enumerate(shared_pair(), 12);
  const auto rule = ExtractionRule::make(0.3, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(extract(tree, rule));
}
BENCHMARK(BM_Extract)->Unit(benchmark::kMicrosecond);

void BM_ExactTau(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(exact_expected_tau(shared_pair()));
}
BENCHMARK(BM_ExactTau)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
