#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pplab/geometry.hpp"

namespace pplab {

/// SplitMix64: tiny splittable 64-bit generator.  Used everywhere so that
/// results are bit-identical across platforms and standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound), bound >= 1.
    uint64_t next_below(uint64_t bound);

private:
    uint64_t state_;
};

/// Deterministic substream seed for trial/stream `index` of a base seed.
uint64_t mix_seed(uint64_t base, uint64_t index);

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<int> random_permutation(int n, SplitMix64& rng);

/// r distinct indices out of 0..n-1, by partial Fisher-Yates, sorted.
std::vector<int> sample_without_replacement(int n, int r, SplitMix64& rng);

/// Distribution of one attribute coordinate: either Uniform(0,1) or a
/// piecewise-linear inverse CDF through breakpoints (u, t) with u strictly
/// increasing from 0 to 1 and t non-decreasing within [0,1].
struct CoordDistribution {
    enum class Kind { Uniform, Pwl };
    Kind kind = Kind::Uniform;
    std::vector<std::pair<double, double>> points;  // (u, t) breakpoints, Pwl only

    void validate() const;
    double sample(double u) const;  // inverse CDF at u in [0,1]
};

/// Per-coordinate attribute distributions for a d-dimensional model.
struct DistributionSpec {
    std::vector<CoordDistribution> coords;

    static DistributionSpec uniform(int d);
    int dim() const { return static_cast<int>(coords.size()); }
    void validate() const;
};

/// n sites with locations uniform in the unit square and attributes drawn
/// per-coordinate from `spec`.  Deterministic in (n, spec, seed); resamples
/// on the (measure-zero) collisions that would violate SiteSet invariants.
SiteSet sample_site_set(int n, const DistributionSpec& spec, uint64_t seed);

/// Same attribute model over fixed locations taken from `base` (file mode).
SiteSet resample_attrs(const SiteSet& base, const DistributionSpec& spec, uint64_t seed);

/// Closed-form probability that a uniform point of [0,1]^d has coordinate
/// product at most delta:  sum_{i=0}^{d-1} (delta / i!) * ln^i(1/delta).
/// Throws std::domain_error unless 0 < delta <= 1.
double v_delta(int d, double delta);

struct VDeltaEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long long samples = 0;
};

/// Monte Carlo estimate of the same probability with binomial standard error.
VDeltaEstimate v_delta_mc(int d, double delta, long long samples, uint64_t seed);

}  // namespace pplab
