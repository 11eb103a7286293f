#include <benchmark/benchmark.h>

#include <vector>

#include "pplab/random_model.hpp"
#include "pplab/staircase.hpp"

using namespace pplab;

namespace {

PointCloud random_cloud(int n, int d, uint64_t seed) {
    SplitMix64 rng(seed);
    PointCloud cloud;
    cloud.dim = d;
    cloud.points.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        AttrPoint p;
        p.coords.reserve(static_cast<size_t>(d));
        for (int j = 0; j < d; ++j) p.coords.push_back(rng.next_double());
        cloud.points.push_back({i, std::move(p)});
    }
    return cloud;
}

}  // namespace

static void BM_Staircase2D(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PointCloud cloud = random_cloud(n, 2, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(staircase(cloud));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_Staircase2D)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

static void BM_Staircase3D(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PointCloud cloud = random_cloud(n, 3, 43);
    for (auto _ : state) {
        benchmark::DoNotOptimize(staircase(cloud));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_Staircase3D)->RangeMultiplier(4)->Range(256, 4096);

static void BM_FrontierStream(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PointCloud cloud = random_cloud(n, 3, 44);
    for (auto _ : state) {
        StaircaseFrontier frontier(3);
        int hits = 0;
        for (const CloudPoint& c : cloud.points)
            if (frontier.insert(c)) ++hits;
        benchmark::DoNotOptimize(hits);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_FrontierStream)->RangeMultiplier(4)->Range(256, 4096);

static void BM_PrefixStaircaseUnion(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PointCloud cloud = random_cloud(n, 2, 45);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prefix_staircase_union(cloud));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_PrefixStaircaseUnion)->RangeMultiplier(4)->Range(256, 4096);

BENCHMARK_MAIN();
