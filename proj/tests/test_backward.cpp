#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pplab/backward.hpp"
#include "pplab/random_model.hpp"
#include "pplab/staircase.hpp"

using namespace pplab;

namespace {

double harmonic(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    return h;
}

std::vector<double> random_values(int n, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> v(static_cast<size_t>(n));
    for (double& x : v) x = rng.next_double();
    return v;
}

PointCloud random_cloud(int n, int d, uint64_t seed) {
    SplitMix64 rng(seed);
    PointCloud c;
    c.dim = d;
    for (int i = 0; i < n; ++i) {
        std::vector<double> coords(static_cast<size_t>(d));
        for (double& v : coords) v = rng.next_double();
        c.points.push_back({i, AttrPoint{std::move(coords)}});
    }
    return c;
}

// Property that deliberately returns an element outside its prefix.
class NonSubsetProperty final : public PrefixProperty {
public:
    std::vector<int> evaluate(std::span<const int> prefix) const override {
        return {static_cast<int>(prefix.size()) + 1000};
    }
};

// Streaming implementation that contradicts its own evaluate().
class LyingStreamProperty final : public PrefixProperty {
public:
    std::vector<int> evaluate(std::span<const int> prefix) const override {
        return {prefix.begin(), prefix.end()};
    }
    bool stream_supported() const override { return true; }
    void stream_reset() override {}
    bool stream_insert(int) override { return false; }  // evaluate() says true
};

}  // namespace

TEST_CASE("backward_run: whole-prefix property fires every indicator") {
    WholePrefixProperty prop;
    const BackwardRun run = backward_run(25, prop, 1);
    CHECK(run.n == 25);
    CHECK(run.sum == 25);
    CHECK(run.indicators.size() == 25);
    for (uint8_t x : run.indicators) CHECK(x == 1);
    // The permutation really is a permutation.
    std::vector<int> p = run.permutation;
    std::sort(p.begin(), p.end());
    for (int i = 0; i < 25; ++i) CHECK(p[static_cast<size_t>(i)] == i);
}

TEST_CASE("backward_run: empty property never fires") {
    EmptyProperty prop;
    const BackwardRun run = backward_run(25, prop, 2);
    CHECK(run.sum == 0);
    for (uint8_t x : run.indicators) CHECK(x == 0);
}

TEST_CASE("backward_run: X_1 fires whenever the first element is selected") {
    // For the prefix minimum the first inserted element is always the minimum
    // of its one-element prefix.
    for (uint64_t seed = 0; seed < 20; ++seed) {
        PrefixMinimumProperty prop(random_values(50, 500 + seed));
        const BackwardRun run = backward_run(50, prop, seed);
        CHECK(run.indicators[0] == 1);
        CHECK(run.sum >= 1);
        CHECK(run.sum <= 50);
    }
}

TEST_CASE("backward_run: sum attribution points at the inserted element") {
    PrefixMinimumProperty prop(random_values(40, 9));
    const BackwardRun run = backward_run(40, prop, 10);
    for (size_t i = 0; i < run.indicators.size(); ++i) {
        if (run.indicators[i])
            CHECK(run.attribution[i] == run.permutation[i]);
        else
            CHECK(run.attribution[i] == -1);
    }
}

TEST_CASE("prefix-minimum mean matches the harmonic number") {
    const int n = 1000;
    const int trials = 400;
    const std::vector<double> values = random_values(n, 77);
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        PrefixMinimumProperty prop(values);
        const BackwardRun run = backward_run(n, prop, mix_seed(4000, static_cast<uint64_t>(t)));
        sum += static_cast<double>(run.sum);
        sumsq += static_cast<double>(run.sum) * static_cast<double>(run.sum);
    }
    const double mean = sum / trials;
    const double var = (sumsq - trials * mean * mean) / (trials - 1);
    const double se = std::sqrt(var / trials);
    const double target = harmonic(n);  // about 7.485 for n = 1000
    CHECK(target == doctest::Approx(7.485).epsilon(1e-3));
    CHECK(std::abs(mean - target) <= 4.0 * se);

    // Mutual independence of the indicators: the variance should match
    // sum (1/i)(1 - 1/i).  Wide cushion, the sample variance of 400 trials
    // is itself noisy.
    double expected_var = 0.0;
    for (int i = 1; i <= n; ++i)
        expected_var += (1.0 / i) * (1.0 - 1.0 / i);
    CHECK(std::abs(var - expected_var) <= 2.0);
}

TEST_CASE("backward_run rejects a property that returns a non-subset") {
    NonSubsetProperty prop;
    CHECK_THROWS_AS(backward_run(10, prop, 1), std::logic_error);
}

TEST_CASE("backward_run cross-checks streaming answers against evaluate()") {
    LyingStreamProperty prop;
    CHECK_THROWS_AS(backward_run(16, prop, 1), std::logic_error);
}

TEST_CASE("backward_run counts declared_k violations") {
    // The whole prefix has size i at step i, so declaring k = 1 is violated at
    // every prefix of size >= 2.
    WholePrefixProperty prop(1);
    const BackwardRun run = backward_run(12, prop, 3);
    CHECK(run.declared_k_violations == 11);

    PrefixMinimumProperty honest(random_values(12, 4));
    const BackwardRun ok = backward_run(12, honest, 5);
    CHECK(ok.declared_k_violations == 0);
}

TEST_CASE("debug_order_check accepts order-invariant properties") {
    PrefixMinimumProperty prop(random_values(64, 21));
    BackwardOptions opts;
    opts.debug_order_check = true;
    CHECK_NOTHROW(backward_run(64, prop, 6, opts));
}

TEST_CASE("staircase property sum equals the prefix-union size of the permuted cloud") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const PointCloud cloud = random_cloud(80, 2, 6000 + seed);
        StaircasePrefixProperty prop(cloud);
        const BackwardRun run = backward_run(80, prop, seed);

        // Oracle: X_i marks exactly the points that are on the staircase of
        // their own prefix, so the indicator sum is the size of the prefix
        // staircase union in insertion order.
        PointCloud permuted;
        permuted.dim = cloud.dim;
        for (int el : run.permutation)
            permuted.points.push_back(cloud.points[static_cast<size_t>(el)]);
        const size_t expected = prefix_staircase_union(permuted).size();
        CHECK(static_cast<size_t>(run.sum) == expected);
    }
}

TEST_CASE("StaircasePrefixProperty requires ids to equal indices") {
    PointCloud bad = random_cloud(5, 2, 1);
    bad.points[2].id = 99;
    CHECK_THROWS_AS(StaircasePrefixProperty{bad}, std::invalid_argument);
}

TEST_CASE("tail_probability: prefix minimum never exceeds the gamma threshold") {
    const int n = 1000;
    const double gamma = 2.0 * 2.718281828459045;
    PrefixMinimumProperty prop(random_values(n, 8));
    const TailResult tail = tail_probability(n, prop, 1, gamma, 100, 9);
    CHECK(tail.trials == 100);
    CHECK(tail.threshold == doctest::Approx(gamma * 2.0 * std::log(static_cast<double>(n))));
    CHECK(tail.exceed_count == 0);
    CHECK(tail.fraction == 0.0);
    CHECK(tail.sums.size() == 100);
    for (long long s : tail.sums) {
        CHECK(s >= 1);
        CHECK(s <= n);
    }
}

TEST_CASE("tail_probability counts exceedances against a tiny threshold") {
    // With gamma forced far below the legal regime the sum (about H_n) always
    // clears the threshold; the harness just reports the fraction.
    const int n = 100;
    PrefixMinimumProperty prop(random_values(n, 10));
    const TailResult tail = tail_probability(n, prop, 1, 0.05, 50, 11);
    CHECK(tail.threshold < 1.0);
    CHECK(tail.exceed_count == 50);
    CHECK(tail.fraction == 1.0);
}

TEST_CASE("quicksort_comparisons: tiny cases") {
    const QuicksortStats one = quicksort_comparisons(1, 1);
    CHECK(one.total == 0);
    CHECK(one.per_element.size() == 1);
    CHECK(one.per_element[0] == 0);

    const QuicksortStats two = quicksort_comparisons(2, 2);
    CHECK(two.total == 1);
    CHECK(two.per_element.size() == 2);
    CHECK(two.per_element[0] + two.per_element[1] == 1);
}

TEST_CASE("quicksort_comparisons: total equals the sum of per-element counts") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const QuicksortStats stats = quicksort_comparisons(500, 7000 + seed);
        long long sum = 0;
        for (int c : stats.per_element) sum += c;
        CHECK(stats.total == sum);
        // Worst case is strictly below n^2.
        CHECK(stats.total < 500LL * 500LL);
    }
}

TEST_CASE("quicksort mean total tracks the closed form 2(n+1)H_n - 4n") {
    const int n = 2000;
    const int trials = 30;
    const double expected = 2.0 * (n + 1) * harmonic(n) - 4.0 * n;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t)
        sum += static_cast<double>(quicksort_comparisons(n, mix_seed(8000, static_cast<uint64_t>(t))).total);
    const double mean = sum / trials;
    CHECK(std::abs(mean - expected) <= 0.05 * expected);
}

TEST_CASE("quicksort per-element counts respect the backward-analysis bound") {
    const int n = 2000;
    const double bound = 2.0 * 2.718281828459045 * 4.0 * std::log(static_cast<double>(n));
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const QuicksortStats stats = quicksort_comparisons(n, 9000 + seed);
        const int worst = *std::max_element(stats.per_element.begin(), stats.per_element.end());
        CHECK(static_cast<double>(worst) <= bound);
    }
}
