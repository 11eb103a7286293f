#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pplab/arrangement.hpp"
#include "pplab/random_model.hpp"

using namespace pplab;

namespace {

std::vector<Line> random_lines(int m, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Line> lines;
    lines.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double angle = rng.next_double() * std::numbers::pi;
        const double offset = rng.next_double() * 2.0 - 1.0;
        lines.push_back(make_line(std::cos(angle), std::sin(angle), offset));
    }
    return lines;
}

}  // namespace

static void BM_BuildArrangement(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const std::vector<Line> lines = random_lines(m, 7);
    const BBox box{-2.0, -2.0, 2.0, 2.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_arrangement(lines, box));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_BuildArrangement)->RangeMultiplier(2)->Range(4, 64)->Complexity();

static void BM_PointLocate(benchmark::State& state) {
    const std::vector<Line> lines = random_lines(32, 8);
    const BBox box{-2.0, -2.0, 2.0, 2.0};
    const PlanarSubdivision sub = build_arrangement(lines, box);
    SplitMix64 rng(9);
    std::vector<PlanePoint> queries;
    for (int i = 0; i < 1024; ++i)
        queries.push_back({rng.next_double() * 3.8 - 1.9, rng.next_double() * 3.8 - 1.9});
    size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(point_locate(sub, queries[q]));
        q = (q + 1) % queries.size();
    }
}
BENCHMARK(BM_PointLocate);

static void BM_CandidateDiagram(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(candidate_diagram(s));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_CandidateDiagram)->RangeMultiplier(2)->Range(4, 32);

static void BM_KthOrderCells(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kth_order_cells(s, 2));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_KthOrderCells)->RangeMultiplier(2)->Range(4, 16);

BENCHMARK_MAIN();
