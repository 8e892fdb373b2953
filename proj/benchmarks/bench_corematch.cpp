#include <benchmark/benchmark.h>

#include "corematch/graph.hpp"
#include "corematch/matching.hpp"
#include "corematch/models.hpp"
#include "corematch/theory.hpp"

namespace {

using namespace corematch;

Graph random_er_graph(int n, double mean_degree, std::uint64_t seed) {
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, mean_degree / n});
    RngStream rng(seed, 0);
    return sample_graph(probs, rng);
}

void BM_KCorePeel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Graph g = random_er_graph(n, 8.0, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(k_core(g, 3));
    }
    state.SetItemsProcessed(state.iterations() * (n + g.edge_count()));
}
BENCHMARK(BM_KCorePeel)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17);

void BM_SampleGraph(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, 8.0 / n});
    std::uint64_t trial = 0;
    for (auto _ : state) {
        RngStream rng(7, trial++);
        benchmark::DoNotOptimize(sample_graph(probs, rng));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * (n - 1) / 2);
}
BENCHMARK(BM_SampleGraph)->Arg(256)->Arg(1024)->Arg(3000);

void BM_SampleCorrelatedPair(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, 10.0 / n});
    std::uint64_t trial = 0;
    for (auto _ : state) {
        RngStream rng(7, trial++);
        benchmark::DoNotOptimize(sample_correlated_pair(probs, 0.9, rng));
    }
}
BENCHMARK(BM_SampleCorrelatedPair)->Arg(256)->Arg(1024);

void BM_IntersectionGraph(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, 10.0 / n});
    RngStream rng(9, 0);
    const CorrelatedPair pair = sample_correlated_pair(probs, 0.9, rng);
    const Matching truth = Matching::from_permutation(pair.truth);
    for (auto _ : state) {
        benchmark::DoNotOptimize(intersection_graph(pair.g1, pair.g2, truth));
    }
}
BENCHMARK(BM_IntersectionGraph)->Arg(256)->Arg(1024);

void BM_BruteForceEstimator(benchmark::State& state) {
    const int n = 6;
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, 0.8});
    RngStream rng(11, 0);
    const CorrelatedPair pair = sample_correlated_pair(probs, 0.9, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_k_core_estimator(pair.g1, pair.g2, 2));
    }
}
BENCHMARK(BM_BruteForceEstimator);

} // namespace

BENCHMARK_MAIN();
