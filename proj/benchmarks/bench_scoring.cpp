#include <benchmark/benchmark.h>

#include "parseid/evaluation.hpp"
#include "parseid/scoring.hpp"
#include "synth.hpp"

namespace {

using namespace parseid;

std::vector<FeatureRecord> gallery(std::size_t n) {
  std::mt19937_64 rng(42);
  std::vector<FeatureRecord> g;
  g.reserve(n);
  for (std::size_t i = 0; i < n; ++i) g.push_back(synth::random_record(rng, std::to_string(i)));
  return g;
}

void BM_PairScore(benchmark::State& state) {
  const auto g = gallery(256);
  const ScoringConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_score_value(g[i & 255], g[(i * 7 + 3) & 255], config));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PairScore);

void BM_PairScoreReport(benchmark::State& state) {
  const auto g = gallery(256);
  const ScoringConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_score(g[i & 255], g[(i * 7 + 3) & 255], config));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PairScoreReport);

// One query against a gallery, scoring plus sort. 19732 is the Market test set.
void BM_RankQuery(benchmark::State& state) {
  const auto g = gallery(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(7);
  const auto q = synth::random_record(rng, "q");
  const auto workers = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_query(q, g, ScoringConfig{}, {}, workers));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankQuery)
    ->Args({1000, 1})
    ->Args({19732, 1})
    ->Args({19732, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
