#include <benchmark/benchmark.h>

#include <vector>

#include "pplab/arrangement.hpp"
#include "pplab/candidate.hpp"
#include "pplab/geometry.hpp"
#include "pplab/random_model.hpp"

using namespace pplab;

namespace {

std::vector<PlanePoint> query_pool(int count, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<PlanePoint> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back({rng.next_double(), rng.next_double()});
    return out;
}

}  // namespace

// One proxy-set query at the parameter scale the containment experiments use:
// k = ceil(2 ln^2 n) with the volume ordering precomputed once.
static void BM_ProxySetQuery(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 21);
    const int k = proxy_k(n, 2, 2.0);
    const std::vector<int> order = volume_ordering(s);
    const std::vector<PlanePoint> queries = query_pool(512, 22);
    size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(proxy_set(queries[q], s, k, order));
        q = (q + 1) % queries.size();
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_ProxySetQuery)->RangeMultiplier(2)->Range(256, 2048)->Complexity();

static void BM_CandidateSetQuery(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 23);
    const std::vector<PlanePoint> queries = query_pool(512, 24);
    size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(candidate_set(queries[q], s));
        q = (q + 1) % queries.size();
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_CandidateSetQuery)->RangeMultiplier(2)->Range(256, 2048)->Complexity();

static void BM_EnvironmentPolygon(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 25);
    const BBox box = default_diagram_bbox(s);
    int id = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(k_environment_polygon(s.sites[static_cast<size_t>(id)].id, s, 2, box));
        id = (id + 1) % n;
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_EnvironmentPolygon)->RangeMultiplier(2)->Range(8, 64);

BENCHMARK_MAIN();
