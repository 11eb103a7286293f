#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pplab/staircase.hpp"

namespace pplab {

/// A property of a growing element sequence: for every prefix it selects a
/// subset of the prefix (by element id).  evaluate() must be insertion-order
/// invariant except through membership.  Properties may optionally support a
/// streaming protocol (stream_reset / stream_insert) that answers only the
/// membership question "is the element just inserted selected for the new
/// prefix?"; the harness cross-checks it against evaluate() at checkpoints.
class PrefixProperty {
public:
    virtual ~PrefixProperty() = default;

    virtual std::vector<int> evaluate(std::span<const int> prefix) const = 0;
    virtual std::optional<int> declared_k() const { return std::nullopt; }

    virtual bool stream_supported() const { return false; }
    virtual void stream_reset() {}
    virtual bool stream_insert(int /*element*/) { return false; }
};

/// One sequential insertion experiment over a uniform random permutation.
struct BackwardRun {
    int n = 0;
    std::vector<int> permutation;     // insertion order (element ids)
    std::vector<uint8_t> indicators;  // indicator X_i for prefix length i, at index i-1
    long long sum = 0;                // number of set indicators
    std::vector<int> attribution;     // element charged by X_i, or -1
    int declared_k_violations = 0;    // prefixes where |P(prefix)| exceeded declared_k
};

struct BackwardOptions {
    bool debug_order_check = false;  // re-evaluate a shuffled prefix copy at checkpoints
};

/// Draws a uniform random permutation of 0..n-1, inserts elements one by one
/// and records X_i = [inserted element is selected by the property of the new
/// prefix].  Throws std::logic_error if the property returns a non-subset of
/// its prefix, or if a streaming answer disagrees with evaluate() at a
/// checkpoint (prefix lengths 1, 2, 4, ... and n).
BackwardRun backward_run(int n, PrefixProperty& prop, uint64_t seed,
                         const BackwardOptions& opts = {});

struct TailResult {
    double fraction = 0.0;  // trials with sum > threshold
    double threshold = 0.0; // gamma * 2k * ln n
    int trials = 0;
    int exceed_count = 0;
    std::vector<long long> sums;  // per-trial indicator sums
};

/// Fraction of independent runs whose indicator sum exceeds gamma * 2k ln n.
TailResult tail_probability(int n, PrefixProperty& prop, int k, double gamma, int trials,
                            uint64_t seed);

struct QuicksortStats {
    long long total = 0;
    std::vector<int> per_element;  // comparisons charged to each key
};

/// Simulates quicksort with uniformly random pivots on n distinct keys and
/// counts, per key, how many pivots it was compared against.
QuicksortStats quicksort_comparisons(int n, uint64_t seed);

// ---- stock properties -------------------------------------------------------

/// Elements are indices into a fixed value array; the property selects the
/// single minimum of the prefix (ties by smaller id).  declared_k = 1.
class PrefixMinimumProperty final : public PrefixProperty {
public:
    explicit PrefixMinimumProperty(std::vector<double> values) : values_(std::move(values)) {}

    std::vector<int> evaluate(std::span<const int> prefix) const override;
    std::optional<int> declared_k() const override { return 1; }

    bool stream_supported() const override { return true; }
    void stream_reset() override { have_ = false; }
    bool stream_insert(int element) override;

private:
    std::vector<double> values_;
    bool have_ = false;
    double best_ = 0.0;
    int best_id_ = -1;
};

/// Elements are indices into a fixed point cloud whose point ids equal their
/// indices; the property selects the staircase of the prefix.
class StaircasePrefixProperty final : public PrefixProperty {
public:
    StaircasePrefixProperty(PointCloud cloud, std::optional<int> k_bound = std::nullopt)
        : cloud_(std::move(cloud)), k_bound_(k_bound), frontier_(cloud_.dim) {
        for (size_t i = 0; i < cloud_.points.size(); ++i)
            if (cloud_.points[i].id != static_cast<int>(i))
                throw std::invalid_argument(
                    "StaircasePrefixProperty: cloud point ids must equal their indices");
    }

    std::vector<int> evaluate(std::span<const int> prefix) const override;
    std::optional<int> declared_k() const override { return k_bound_; }

    bool stream_supported() const override { return true; }
    void stream_reset() override { frontier_ = StaircaseFrontier(cloud_.dim); }
    bool stream_insert(int element) override;

private:
    PointCloud cloud_;
    std::optional<int> k_bound_;
    StaircaseFrontier frontier_;
};

/// Selects the whole prefix (every indicator fires); for harness tests.
class WholePrefixProperty final : public PrefixProperty {
public:
    explicit WholePrefixProperty(std::optional<int> k_bound = std::nullopt) : k_bound_(k_bound) {}
    std::vector<int> evaluate(std::span<const int> prefix) const override {
        return {prefix.begin(), prefix.end()};
    }
    std::optional<int> declared_k() const override { return k_bound_; }

private:
    std::optional<int> k_bound_;
};

/// Selects nothing (no indicator ever fires); for harness tests.
class EmptyProperty final : public PrefixProperty {
public:
    std::vector<int> evaluate(std::span<const int>) const override { return {}; }
    std::optional<int> declared_k() const override { return 0; }
};

}  // namespace pplab
