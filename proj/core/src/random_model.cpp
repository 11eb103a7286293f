#include "pplab/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pplab {

uint64_t SplitMix64::next_below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
    // rejection sampling on the top range to stay unbiased
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % bound;
}

uint64_t mix_seed(uint64_t base, uint64_t index) {
    SplitMix64 g(base ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return g.next();
}

std::vector<int> random_permutation(int n, SplitMix64& rng) {
    std::vector<int> p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i) + 1));
        std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]);
    }
    return p;
}

std::vector<int> sample_without_replacement(int n, int r, SplitMix64& rng) {
    if (r < 0 || r > n) throw std::invalid_argument("sample_without_replacement: need 0 <= r <= n");
    std::vector<int> p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
    for (int i = 0; i < r; ++i) {
        const auto j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(n - i)));
        std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]);
    }
    std::vector<int> out(p.begin(), p.begin() + r);
    std::sort(out.begin(), out.end());
    return out;
}

void CoordDistribution::validate() const {
    if (kind == Kind::Uniform) return;
    if (points.size() < 2)
        throw std::invalid_argument("distribution: pwl needs at least 2 breakpoints");
    if (points.front().first != 0.0 || points.back().first != 1.0)
        throw std::invalid_argument("distribution: pwl u-range must span [0,1]");
    for (size_t i = 0; i < points.size(); ++i) {
        const auto& [u, t] = points[i];
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("distribution: pwl t values must lie in [0,1]");
        if (i > 0) {
            if (points[i - 1].first >= u)
                throw std::invalid_argument("distribution: pwl u values must be strictly increasing");
            if (points[i - 1].second > t)
                throw std::invalid_argument("distribution: pwl t values must be non-decreasing");
        }
    }
}

double CoordDistribution::sample(double u) const {
    if (kind == Kind::Uniform) return u;
    // binary search for the segment containing u, then interpolate
    size_t lo = 0, hi = points.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (points[mid].first <= u)
            lo = mid;
        else
            hi = mid;
    }
    const auto& [u0, t0] = points[lo];
    const auto& [u1, t1] = points[hi];
    const double w = (u - u0) / (u1 - u0);
    return t0 + w * (t1 - t0);
}

DistributionSpec DistributionSpec::uniform(int d) {
    DistributionSpec s;
    s.coords.resize(static_cast<size_t>(d));
    return s;
}

void DistributionSpec::validate() const {
    if (coords.empty()) throw std::invalid_argument("distribution spec: no coordinates");
    for (const CoordDistribution& c : coords) c.validate();
}

namespace {

bool has_duplicate(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

// Draw one attribute column, re-drawing on exact value collisions so the
// per-coordinate distinctness invariant holds (collisions have probability
// ~ n^2 * 2^-53 and essentially never trigger).
std::vector<double> draw_column(int n, const CoordDistribution& dist, SplitMix64& rng) {
    std::vector<double> col(static_cast<size_t>(n));
    for (int attempt = 0; attempt < 64; ++attempt) {
        for (double& v : col) v = dist.sample(rng.next_double());
        if (!has_duplicate(col)) return col;
    }
    throw std::runtime_error("sample_site_set: could not draw distinct attribute values "
                             "(distribution too concentrated)");
}

}  // namespace

SiteSet sample_site_set(int n, const DistributionSpec& spec, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_site_set: n must be >= 1");
    spec.validate();

    SiteSet s;
    s.dim = spec.dim();
    s.sites.resize(static_cast<size_t>(n));
    SplitMix64 rng(mix_seed(seed, 0));
    for (int i = 0; i < n; ++i) {
        s.sites[static_cast<size_t>(i)].id = i;
        s.sites[static_cast<size_t>(i)].loc = {rng.next_double(), rng.next_double()};
        s.sites[static_cast<size_t>(i)].attrs.coords.resize(static_cast<size_t>(s.dim));
    }
    SplitMix64 attr_rng(mix_seed(seed, 1));
    for (int c = 0; c < s.dim; ++c) {
        const std::vector<double> col = draw_column(n, spec.coords[static_cast<size_t>(c)], attr_rng);
        for (int i = 0; i < n; ++i) s.sites[static_cast<size_t>(i)].attrs[c] = col[static_cast<size_t>(i)];
    }
    s.validate();
    return s;
}

SiteSet resample_attrs(const SiteSet& base, const DistributionSpec& spec, uint64_t seed) {
    spec.validate();
    if (spec.dim() < 1) throw std::invalid_argument("resample_attrs: empty spec");
    SiteSet s = base;
    s.dim = spec.dim();
    SplitMix64 attr_rng(mix_seed(seed, 1));
    for (Site& site : s.sites) site.attrs.coords.assign(static_cast<size_t>(s.dim), 0.0);
    for (int c = 0; c < s.dim; ++c) {
        const std::vector<double> col =
            draw_column(s.size(), spec.coords[static_cast<size_t>(c)], attr_rng);
        for (int i = 0; i < s.size(); ++i) s.sites[static_cast<size_t>(i)].attrs[c] = col[static_cast<size_t>(i)];
    }
    s.validate();
    return s;
}

double v_delta(int d, double delta) {
    if (d < 1) throw std::invalid_argument("v_delta: d must be >= 1");
    if (!(delta > 0.0) || delta > 1.0)
        throw std::domain_error("v_delta: delta must lie in (0,1]");
    // ln(1/delta) via log1p so values of delta near 1 keep full precision
    const double L = std::log1p((1.0 - delta) / delta);
    // terms delta * L^i / i!, accumulated from i = d-1 down to 0
    std::vector<double> terms(static_cast<size_t>(d));
    double term = delta;
    terms[0] = term;
    for (int i = 1; i < d; ++i) {
        term *= L / i;
        terms[static_cast<size_t>(i)] = term;
    }
    double sum = 0.0;
    for (int i = d - 1; i >= 0; --i) sum += terms[static_cast<size_t>(i)];
    return sum;
}

VDeltaEstimate v_delta_mc(int d, double delta, long long samples, uint64_t seed) {
    if (d < 1) throw std::invalid_argument("v_delta_mc: d must be >= 1");
    if (!(delta > 0.0) || delta > 1.0)
        throw std::domain_error("v_delta_mc: delta must lie in (0,1]");
    if (samples < 1) throw std::invalid_argument("v_delta_mc: samples must be >= 1");

    SplitMix64 rng(mix_seed(seed, 0));
    long long hits = 0;
    for (long long s = 0; s < samples; ++s) {
        double prod = 1.0;
        for (int i = 0; i < d; ++i) prod *= rng.next_double();
        if (prod <= delta) ++hits;
    }
    VDeltaEstimate e;
    e.samples = samples;
    e.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
    return e;
}

}  // namespace pplab
