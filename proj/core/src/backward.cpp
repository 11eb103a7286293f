#include "pplab/backward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "pplab/random_model.hpp"

namespace pplab {

namespace {

void check_subset(std::span<const int> prefix, const std::vector<int>& selected) {
    std::unordered_set<int> in(prefix.begin(), prefix.end());
    for (int e : selected)
        if (!in.count(e))
            throw std::logic_error("backward_run: property selected element " +
                                   std::to_string(e) + " outside its prefix");
}

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

BackwardRun backward_run(int n, PrefixProperty& prop, uint64_t seed, const BackwardOptions& opts) {
    if (n < 1) throw std::invalid_argument("backward_run: n must be >= 1");

    SplitMix64 rng(mix_seed(seed, 0));
    BackwardRun run;
    run.n = n;
    run.permutation = random_permutation(n, rng);
    run.indicators.resize(static_cast<size_t>(n), 0);
    run.attribution.resize(static_cast<size_t>(n), -1);

    const bool streaming = prop.stream_supported();
    if (streaming) prop.stream_reset();

    long long next_checkpoint = 1;
    for (int i = 1; i <= n; ++i) {
        const int inserted = run.permutation[static_cast<size_t>(i - 1)];
        const std::span<const int> prefix(run.permutation.data(), static_cast<size_t>(i));

        bool x_i;
        if (streaming) {
            x_i = prop.stream_insert(inserted);
        } else {
            const std::vector<int> selected = prop.evaluate(prefix);
            check_subset(prefix, selected);
            if (prop.declared_k() && static_cast<int>(selected.size()) > *prop.declared_k())
                ++run.declared_k_violations;
            x_i = contains(selected, inserted);
        }

        // checkpoints (powers of two and the full sequence): validate the
        // contract, the declared bound, and streaming/order consistency
        if (i == next_checkpoint || i == n) {
            while (next_checkpoint <= i) next_checkpoint *= 2;
            const std::vector<int> selected = prop.evaluate(prefix);
            check_subset(prefix, selected);
            if (prop.declared_k() && static_cast<int>(selected.size()) > *prop.declared_k() &&
                streaming)
                ++run.declared_k_violations;
            if (streaming && contains(selected, inserted) != x_i)
                throw std::logic_error("backward_run: streaming answer disagrees with evaluate() "
                                       "at prefix length " + std::to_string(i));
            if (opts.debug_order_check) {
                std::vector<int> shuffled(prefix.begin(), prefix.end());
                for (size_t j = shuffled.size(); j > 1; --j)
                    std::swap(shuffled[j - 1], shuffled[rng.next_below(j)]);
                std::vector<int> reselected = prop.evaluate(shuffled);
                std::vector<int> a = selected, b = reselected;
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                if (a != b)
                    throw std::logic_error("backward_run: property output depends on prefix "
                                           "order at length " + std::to_string(i));
            }
        }

        if (x_i) {
            run.indicators[static_cast<size_t>(i - 1)] = 1;
            run.attribution[static_cast<size_t>(i - 1)] = inserted;
            ++run.sum;
        }
    }
    return run;
}

TailResult tail_probability(int n, PrefixProperty& prop, int k, double gamma, int trials,
                            uint64_t seed) {
    if (k < 0) throw std::invalid_argument("tail_probability: k must be >= 0");
    if (trials < 1) throw std::invalid_argument("tail_probability: trials must be >= 1");
    TailResult r;
    r.trials = trials;
    r.threshold = gamma * 2.0 * static_cast<double>(k) * std::log(static_cast<double>(n));
    r.sums.reserve(static_cast<size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        const BackwardRun run = backward_run(n, prop, mix_seed(seed, static_cast<uint64_t>(t)));
        r.sums.push_back(run.sum);
        if (static_cast<double>(run.sum) > r.threshold) ++r.exceed_count;
    }
    r.fraction = static_cast<double>(r.exceed_count) / static_cast<double>(trials);
    return r;
}

QuicksortStats quicksort_comparisons(int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("quicksort_comparisons: n must be >= 1");
    QuicksortStats stats;
    stats.per_element.assign(static_cast<size_t>(n), 0);
    SplitMix64 rng(mix_seed(seed, 0));

    // ranges of ranks; a uniformly chosen pivot rank partitions the range
    std::vector<std::pair<int, int>> stack{{0, n}};
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        if (hi - lo < 2) continue;
        const int pivot = lo + static_cast<int>(rng.next_below(static_cast<uint64_t>(hi - lo)));
        for (int x = lo; x < hi; ++x) {
            if (x == pivot) continue;
            ++stats.per_element[static_cast<size_t>(x)];
            ++stats.total;
        }
        stack.emplace_back(lo, pivot);
        stack.emplace_back(pivot + 1, hi);
    }
    return stats;
}

std::vector<int> PrefixMinimumProperty::evaluate(std::span<const int> prefix) const {
    if (prefix.empty()) return {};
    int best = prefix[0];
    for (int e : prefix) {
        const double v = values_.at(static_cast<size_t>(e));
        const double bv = values_.at(static_cast<size_t>(best));
        if (v < bv || (v == bv && e < best)) best = e;
    }
    return {best};
}

bool PrefixMinimumProperty::stream_insert(int element) {
    const double v = values_.at(static_cast<size_t>(element));
    if (!have_ || v < best_ || (v == best_ && element < best_id_)) {
        have_ = true;
        best_ = v;
        best_id_ = element;
        return true;
    }
    return false;
}

std::vector<int> StaircasePrefixProperty::evaluate(std::span<const int> prefix) const {
    PointCloud sub;
    sub.dim = cloud_.dim;
    sub.points.reserve(prefix.size());
    for (int e : prefix) sub.points.push_back(cloud_.points.at(static_cast<size_t>(e)));
    return staircase(sub);
}

bool StaircasePrefixProperty::stream_insert(int element) {
    return frontier_.insert(cloud_.points.at(static_cast<size_t>(element)));
}

}  // namespace pplab
