#include "pplab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ctime>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "pplab/arrangement.hpp"
#include "pplab/backward.hpp"
#include "pplab/candidate.hpp"
#include "pplab/geometry.hpp"
#include "pplab/levels.hpp"
#include "pplab/staircase.hpp"

namespace pplab {

namespace {

using json = nlohmann::json;
using Row = std::vector<double>;

constexpr double kTwoE = 5.43656365691809;  // 2e, default tail factor

double harmonic(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso_utc_now() {
    const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format_note(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

/// Runs body(t) for t in [0, trials) and stores its row at index t.  Work is
/// handed out by an atomic counter; output depends only on the trial index,
/// never on the worker count.
void for_each_trial(int trials, int threads, std::vector<Row>& rows,
                    const std::function<Row(int)>& body) {
    rows.assign(static_cast<size_t>(trials), {});
    const int workers = std::clamp(threads, 1, std::max(1, trials));
    if (workers <= 1 || trials <= 1) {
        for (int t = 0; t < trials; ++t) rows[static_cast<size_t>(t)] = body(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                rows[static_cast<size_t>(t)] = body(t);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

double column_mean(const std::vector<Row>& rows, size_t col) {
    double s = 0.0;
    for (const Row& r : rows) s += r[col];
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

double column_stderr(const std::vector<Row>& rows, size_t col, double mean) {
    if (rows.size() < 2) return 0.0;
    double ss = 0.0;
    for (const Row& r : rows) {
        const double d = r[col] - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(rows.size() - 1)) /
           std::sqrt(static_cast<double>(rows.size()));
}

DistributionSpec effective_dist(const ExperimentConfig& cfg) {
    return cfg.dist ? *cfg.dist : DistributionSpec::uniform(cfg.d);
}

PlanePoint random_in_box(const BBox& box, SplitMix64& rng) {
    return {box.xmin + box.width() * rng.next_double(),
            box.ymin + box.height() * rng.next_double()};
}

// ---------------------------------------------------------------------------
// Experiment bodies.  Each gets the effective (post-default) config.
// ---------------------------------------------------------------------------

ExperimentResult run_vdelta(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "d", "delta", "samples", "closed_form", "estimate",
                   "std_error", "within4"};
    const double cf = v_delta(cfg.d, cfg.delta);
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const VDeltaEstimate est = v_delta_mc(cfg.d, cfg.delta, cfg.samples, mix_seed(cfg.seed, static_cast<uint64_t>(t)));
        const bool ok = std::abs(cf - est.estimate) <= 4.0 * est.std_error;
        return {static_cast<double>(t), static_cast<double>(cfg.d), cfg.delta,
                static_cast<double>(cfg.samples), cf, est.estimate, est.std_error,
                ok ? 1.0 : 0.0};
    });
    int bad = 0;
    for (const Row& r : res.rows)
        if (r[7] == 0.0) ++bad;
    if (bad > 0) res.soft_pass = false;
    res.notes.push_back(format_note(
        "closed form %.9g; %d of %d Monte Carlo trial(s) within 4 standard errors", cf,
        cfg.trials - bad, cfg.trials));
    return res;
}

PointCloud sample_cloud(int n, int d, uint64_t seed) {
    SplitMix64 rng(seed);
    PointCloud cloud;
    cloud.dim = d;
    cloud.points.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> coords(static_cast<size_t>(d));
        for (double& c : coords) c = rng.next_double();
        cloud.points.push_back({i, AttrPoint{std::move(coords)}});
    }
    return cloud;
}

ExperimentResult run_staircase_mean(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "size"};
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const PointCloud cloud = sample_cloud(cfg.n, 2, mix_seed(cfg.seed, static_cast<uint64_t>(t)));
        return {static_cast<double>(t), static_cast<double>(cfg.n),
                static_cast<double>(staircase(cloud).size())};
    });
    const double target = harmonic(cfg.n);
    if (res.rows.size() >= 2) {
        const double mean = column_mean(res.rows, 2);
        const double se = column_stderr(res.rows, 2, mean);
        if (std::abs(mean - target) > 4.0 * se) res.soft_pass = false;
        res.notes.push_back(format_note(
            "mean staircase size %.9g vs harmonic number %.9g (4*stderr = %.9g)", mean, target,
            4.0 * se));
    } else {
        res.notes.push_back("too few trials for the mean check; skipped");
    }
    return res;
}

ExperimentResult run_staircase_whp(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "d", "size", "bound", "ok"};
    const double bound = 8.0 * std::pow(std::log(static_cast<double>(cfg.n)), cfg.d - 1);
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const PointCloud cloud = sample_cloud(cfg.n, cfg.d, mix_seed(cfg.seed, static_cast<uint64_t>(t)));
        const double size = static_cast<double>(staircase(cloud).size());
        return {static_cast<double>(t), static_cast<double>(cfg.n), static_cast<double>(cfg.d),
                size, bound, size <= bound ? 1.0 : 0.0};
    });
    int bad = 0;
    double worst = 0.0;
    for (const Row& r : res.rows) {
        worst = std::max(worst, r[3]);
        if (r[5] == 0.0) ++bad;
    }
    if (bad > 0) res.soft_pass = false;
    res.notes.push_back(format_note("max staircase size %.9g vs ceiling %.9g; %d violation(s)",
                                    worst, bound, bad));
    return res;
}

ExperimentResult run_backward_quicksort(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "total", "expected_total", "max_per_element",
                   "per_element_bound", "ok"};
    const double hn = harmonic(cfg.n);
    const double expected = 2.0 * (cfg.n + 1) * hn - 4.0 * cfg.n;
    const double per_bound = kTwoE * 4.0 * std::log(static_cast<double>(cfg.n));
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const QuicksortStats stats = quicksort_comparisons(cfg.n, mix_seed(cfg.seed, static_cast<uint64_t>(t)));
        const int maxpe = stats.per_element.empty()
                              ? 0
                              : *std::max_element(stats.per_element.begin(), stats.per_element.end());
        return {static_cast<double>(t), static_cast<double>(cfg.n),
                static_cast<double>(stats.total), expected, static_cast<double>(maxpe),
                per_bound, maxpe <= per_bound ? 1.0 : 0.0};
    });
    int bad = 0;
    for (const Row& r : res.rows)
        if (r[6] == 0.0) ++bad;
    if (bad > 0) res.soft_pass = false;
    if (!res.rows.empty()) {
        const double mean_total = column_mean(res.rows, 2);
        if (std::abs(mean_total - expected) > 0.05 * expected) res.soft_pass = false;
        res.notes.push_back(format_note(
            "mean comparisons %.9g vs closed form %.9g; per-element bound %.9g, %d violation(s)",
            mean_total, expected, per_bound, bad));
    }
    return res;
}

ExperimentResult run_backward_tail(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "k", "gamma", "sum", "threshold", "exceeded"};
    const int k = 1;  // prefix-minimum property: at most one marked element
    const double threshold = cfg.gamma * 2.0 * k * std::log(static_cast<double>(cfg.n));
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        SplitMix64 vals(mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t)));
        std::vector<double> values(static_cast<size_t>(cfg.n));
        for (double& v : values) v = vals.next_double();
        PrefixMinimumProperty prop(std::move(values));
        const BackwardRun run = backward_run(cfg.n, prop, mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t) + 1));
        const bool exceeded = static_cast<double>(run.sum) > threshold;
        return {static_cast<double>(t), static_cast<double>(cfg.n), static_cast<double>(k),
                cfg.gamma, static_cast<double>(run.sum), threshold, exceeded ? 1.0 : 0.0};
    });
    if (!res.rows.empty()) {
        int exceed = 0;
        for (const Row& r : res.rows)
            if (r[6] != 0.0) ++exceed;
        const double fraction = static_cast<double>(exceed) / static_cast<double>(res.rows.size());
        if (fraction > 0.05) res.soft_pass = false;
        res.notes.push_back(format_note(
            "prefix sums exceeded threshold %.9g in %d of %d trial(s) (fraction %.9g)", threshold,
            exceed, cfg.trials, fraction));
    }
    return res;
}

ExperimentResult run_candidate_vs_oracle(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "queries", "located", "mismatches"};
    const DistributionSpec dist = effective_dist(cfg);
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const SiteSet sites = sample_site_set(cfg.n, dist, mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t)));
        const CandidateDiagram diag = candidate_diagram(sites);
        const BBox& box = diag.subdivision.bbox;
        const double eps =
            1e-6 * (1.0 + std::hypot(box.width(), box.height()));
        SplitMix64 qrng(mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t) + 1));
        int located = 0, mismatches = 0;
        for (int q = 0; q < cfg.queries; ++q) {
            const PlanePoint x = random_in_box(box, qrng);
            PlanePoint probe = x;
            std::optional<int> face = point_locate(diag.subdivision, probe);
            for (int j = 0; j < 8 && !face; ++j) {
                // Near-edge queries: nudge around the compass until a face owns
                // the point, then compare at the nudged location.
                const double ang = 0.25 * 3.14159265358979323846 * j;
                probe = {x.x + eps * std::cos(ang), x.y + eps * std::sin(ang)};
                face = point_locate(diag.subdivision, probe);
            }
            if (!face) continue;
            ++located;
            if (candidate_set(probe, sites).member_ids != diag.face_candidates[static_cast<size_t>(*face)])
                ++mismatches;
        }
        return {static_cast<double>(t), static_cast<double>(cfg.n),
                static_cast<double>(cfg.queries), static_cast<double>(located),
                static_cast<double>(mismatches)};
    });
    long long located = 0, mismatches = 0;
    for (const Row& r : res.rows) {
        located += static_cast<long long>(r[3]);
        mismatches += static_cast<long long>(r[4]);
    }
    if (mismatches > 0) res.hard_pass = false;
    res.notes.push_back(format_note("%lld mismatch(es) over %lld located queries",
                                    static_cast<long long>(mismatches),
                                    static_cast<long long>(located)));
    return res;
}

ExperimentResult run_containment(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "k", "queries", "violations"};
    const DistributionSpec dist = effective_dist(cfg);
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const SiteSet sites = sample_site_set(cfg.n, dist, mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t)));
        const std::vector<int> order = volume_ordering(sites);
        const BBox box = default_diagram_bbox(sites);
        SplitMix64 qrng(mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t) + 1));
        int violations = 0;
        for (int q = 0; q < cfg.queries; ++q) {
            const PlanePoint x = random_in_box(box, qrng);
            const std::vector<int> cand = candidate_set(x, sites).member_ids;
            const std::vector<int> proxy = proxy_set(x, sites, cfg.k, order).member_ids;
            if (!std::includes(proxy.begin(), proxy.end(), cand.begin(), cand.end()))
                ++violations;
        }
        return {static_cast<double>(t), static_cast<double>(cfg.n), static_cast<double>(cfg.k),
                static_cast<double>(cfg.queries), static_cast<double>(violations)};
    });
    long long violations = 0;
    for (const Row& r : res.rows) violations += static_cast<long long>(r[4]);
    if (violations > 0) res.hard_pass = false;
    res.notes.push_back(format_note("%lld containment violation(s) at k = %d",
                                    static_cast<long long>(violations), cfg.k));
    return res;
}

ExperimentResult run_proxy_size(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "k", "queries", "max_size", "mean_size", "size_bound"};
    const DistributionSpec dist = effective_dist(cfg);
    const double bound = 2.0 * cfg.k * std::log(static_cast<double>(cfg.n));
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        // Same substreams as the containment experiment, so equal seeds see
        // the very same instances and queries.
        const SiteSet sites = sample_site_set(cfg.n, dist, mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t)));
        const std::vector<int> order = volume_ordering(sites);
        const BBox box = default_diagram_bbox(sites);
        SplitMix64 qrng(mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t) + 1));
        long long sum = 0;
        int max_size = 0;
        for (int q = 0; q < cfg.queries; ++q) {
            const PlanePoint x = random_in_box(box, qrng);
            const int size = static_cast<int>(proxy_set(x, sites, cfg.k, order).member_ids.size());
            sum += size;
            max_size = std::max(max_size, size);
        }
        const double mean = cfg.queries > 0 ? static_cast<double>(sum) / cfg.queries : 0.0;
        return {static_cast<double>(t), static_cast<double>(cfg.n), static_cast<double>(cfg.k),
                static_cast<double>(cfg.queries), static_cast<double>(max_size), mean, bound};
    });
    if (!res.rows.empty()) {
        double worst = 0.0, mean_of_means = 0.0;
        for (const Row& r : res.rows) {
            worst = std::max(worst, r[4]);
            mean_of_means += r[5];
        }
        mean_of_means /= static_cast<double>(res.rows.size());
        double oracle = 0.0;  // expected size: sum over ranks of min(k/i, 1)
        for (int i = 1; i <= cfg.n; ++i)
            oracle += std::min(static_cast<double>(cfg.k) / static_cast<double>(i), 1.0);
        if (worst > bound) res.soft_pass = false;
        if (std::abs(mean_of_means - oracle) > 0.25 * oracle) res.soft_pass = false;
        res.notes.push_back(format_note(
            "max proxy size %.9g vs bound %.9g; mean %.9g vs reference %.9g (+/-25%%)", worst,
            bound, mean_of_means, oracle));
    }
    return res;
}

ExperimentResult run_online_klevel(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "k", "vertices", "bound", "ok"};
    SplitMix64 lrng(mix_seed(cfg.seed, 0));
    const std::vector<LevelLine> lines = sample_level_lines(cfg.n, lrng);
    const double bound = 2.0 * (cfg.k + 2) * cfg.n;
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        SplitMix64 orng(mix_seed(cfg.seed, static_cast<uint64_t>(t) + 1));
        const std::vector<int> order = random_permutation(cfg.n, orng);
        const int v = incremental_k_level_vertices(lines, order, cfg.k);
        return {static_cast<double>(t), static_cast<double>(cfg.n), static_cast<double>(cfg.k),
                static_cast<double>(v), bound, v <= bound ? 1.0 : 0.0};
    });
    int bad = 0;
    double worst = 0.0;
    for (const Row& r : res.rows) {
        worst = std::max(worst, r[3]);
        if (r[5] == 0.0) ++bad;
    }
    if (bad > 0) res.hard_pass = false;
    res.notes.push_back(format_note("max vertex union %.9g vs bound %.9g; %d violation(s)",
                                    worst, bound, bad));
    return res;
}

ExperimentResult run_edges_per_line(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n", "k_max", "checks", "violations", "max_edges"};
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        SplitMix64 lrng(mix_seed(cfg.seed, static_cast<uint64_t>(t)));
        const std::vector<LevelLine> lines = sample_level_lines(cfg.n, lrng);
        int checks = 0, violations = 0, max_edges = 0;
        for (int line = 0; line < cfg.n; ++line) {
            for (int level = 0; level <= cfg.k; ++level) {
                const int count = edges_on_line_at_level(lines, line, level);
                ++checks;
                max_edges = std::max(max_edges, count);
                if (count > level + 2) ++violations;
            }
        }
        return {static_cast<double>(t), static_cast<double>(cfg.n), static_cast<double>(cfg.k),
                static_cast<double>(checks), static_cast<double>(violations),
                static_cast<double>(max_edges)};
    });
    long long violations = 0;
    for (const Row& r : res.rows) violations += static_cast<long long>(r[4]);
    if (violations > 0) res.hard_pass = false;
    res.notes.push_back(format_note("%lld violation(s) of the k+2 per-line edge bound",
                                    static_cast<long long>(violations)));
    return res;
}

ExperimentResult run_moments(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n_lo", "vertex_sum_lo", "edge_sum_lo",
                   "n_hi", "vertex_sum_hi", "edge_sum_hi"};
    const int n_lo = cfg.n / 2;
    const int r_lo = cfg.r / 2;
    // Substreams per series; each trial inside draws its own substream, so the
    // two series are independent and reproducible.
    const MomentReport hi = moment_experiment(cfg.n, cfg.r, cfg.k, cfg.trials, mix_seed(cfg.seed, 1));
    const MomentReport lo = moment_experiment(n_lo, r_lo, cfg.k, cfg.trials, mix_seed(cfg.seed, 2));
    for (int t = 0; t < cfg.trials; ++t) {
        const auto& rl = lo.rows[static_cast<size_t>(t)];
        const auto& rh = hi.rows[static_cast<size_t>(t)];
        res.rows.push_back({static_cast<double>(t), static_cast<double>(n_lo),
                            static_cast<double>(rl.vertex_sum), static_cast<double>(rl.edge_sum),
                            static_cast<double>(cfg.n), static_cast<double>(rh.vertex_sum),
                            static_cast<double>(rh.edge_sum)});
    }
    if (cfg.trials > 0) {
        if (lo.vertex_mean <= 0.0) {
            res.soft_pass = false;
            res.notes.push_back("small-instance vertex-sum mean is zero; ratio undefined");
        } else {
            const double ratio = hi.vertex_mean / lo.vertex_mean;
            if (ratio < 1.2 || ratio > 3.0) res.soft_pass = false;
            res.notes.push_back(format_note(
                "vertex-sum means %.9g (n=%d) vs %.9g (n=%d); ratio %.9g, band [1.2, 3.0]",
                hi.vertex_mean, cfg.n, lo.vertex_mean, n_lo, ratio));
        }
    }
    return res;
}

ExperimentResult run_overlay_trend(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.columns = {"trial_id", "n_lo", "total_lo", "n_hi", "total_hi"};
    const DistributionSpec dist = effective_dist(cfg);
    const int n_lo = cfg.n / 2;
    for_each_trial(cfg.trials, cfg.threads, res.rows, [&](int t) -> Row {
        const SiteSet hi = sample_site_set(cfg.n, dist, mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t)));
        const SiteSet lo = sample_site_set(n_lo, dist, mix_seed(cfg.seed, 2 * static_cast<uint64_t>(t) + 1));
        const long long total_hi = proxy_overlay_complexity(hi, cfg.k, default_diagram_bbox(hi)).total();
        const long long total_lo = proxy_overlay_complexity(lo, cfg.k, default_diagram_bbox(lo)).total();
        return {static_cast<double>(t), static_cast<double>(n_lo), static_cast<double>(total_lo),
                static_cast<double>(cfg.n), static_cast<double>(total_hi)};
    });
    if (!res.rows.empty()) {
        const double mean_lo = column_mean(res.rows, 2);
        const double mean_hi = column_mean(res.rows, 4);
        if (mean_lo <= 0.0) {
            res.soft_pass = false;
            res.notes.push_back("small-instance overlay mean is zero; ratio undefined");
        } else {
            const double ratio = mean_hi / mean_lo;
            if (ratio > 3.5) res.soft_pass = false;
            res.notes.push_back(format_note(
                "overlay complexity means %.9g (n=%d) vs %.9g (n=%d); ratio %.9g <= 3.5",
                mean_hi, cfg.n, mean_lo, n_lo, ratio));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Config plumbing.
// ---------------------------------------------------------------------------

json dist_to_json(const DistributionSpec& spec) {
    json coords = json::array();
    for (const CoordDistribution& c : spec.coords) {
        json jc;
        if (c.kind == CoordDistribution::Kind::Uniform) {
            jc["kind"] = "uniform";
        } else {
            jc["kind"] = "pwl";
            json pts = json::array();
            for (const auto& [u, t] : c.points) pts.push_back(json::array({u, t}));
            jc["points"] = std::move(pts);
        }
        coords.push_back(std::move(jc));
    }
    return json{{"coords", std::move(coords)}};
}

CoordDistribution coord_from_json(const json& jc) {
    CoordDistribution c;
    const std::string kind = jc.value("kind", "uniform");
    if (kind == "uniform") {
        c.kind = CoordDistribution::Kind::Uniform;
    } else if (kind == "pwl") {
        c.kind = CoordDistribution::Kind::Pwl;
        if (!jc.contains("points") || !jc.at("points").is_array())
            throw ConfigError("pwl distribution needs a 'points' array");
        for (const json& jp : jc.at("points")) {
            if (!jp.is_array() || jp.size() != 2)
                throw ConfigError("pwl breakpoints must be [u, t] pairs");
            c.points.emplace_back(jp.at(0).get<double>(), jp.at(1).get<double>());
        }
    } else {
        throw ConfigError("unknown distribution kind: " + kind);
    }
    return c;
}

// Either {"kind": ...} — one distribution shared by every coordinate — or
// {"coords": [{"kind": ...}, ...]} for per-coordinate control.  A one-entry
// spec is replicated to d coordinates once defaults are applied.
DistributionSpec dist_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("dist must be a JSON object");
    DistributionSpec spec;
    if (j.contains("coords")) {
        if (!j.at("coords").is_array())
            throw ConfigError("dist 'coords' must be an array");
        for (const json& jc : j.at("coords")) spec.coords.push_back(coord_from_json(jc));
    } else {
        spec.coords.push_back(coord_from_json(j));
    }
    return spec;
}

const std::vector<ExperimentInfo>& registry() {
    static const std::vector<ExperimentInfo> table = {
        {"vdelta",
         "the volume-below-delta probability in the unit hypercube equals "
         "sum_{i<d} (delta/i!) ln^i(1/delta), matching Monte Carlo within 4 standard errors",
         false},
        {"staircase-2d-mean",
         "the mean staircase size of n uniform points in the unit square equals the "
         "harmonic number H_n",
         false},
        {"staircase-whp",
         "the staircase of n uniform points in [0,1]^d stays within 8 ln^{d-1} n across trials",
         false},
        {"backward-quicksort",
         "randomized quicksort charges every element at most 2e * 4 ln n comparisons and "
         "totals concentrate on 2(n+1)H_n - 4n",
         false},
        {"backward-tail",
         "the backward-analysis indicator sum exceeds gamma * 2k ln n only rarely for "
         "gamma >= 2e",
         false},
        {"candidate-vs-oracle",
         "every face of the candidate diagram stores exactly the candidate set of each "
         "interior point",
         true},
        {"containment",
         "the candidate set is contained in the proxy set for k = ceil(c1 ln^d n) at every "
         "sampled query",
         true},
        {"proxy-size",
         "proxy sets stay within 2k ln n members, with mean near sum_i min(k/i, 1)",
         false},
        {"online-klevel",
         "inserting n lines in any order accumulates at most 2(k+2)n distinct k-level "
         "vertices",
         true},
        {"edges-per-line",
         "a single line supports at most k+2 edges of the k-level of a line arrangement",
         true},
        {"moments",
         "the expected below-conflict mass over a without-replacement sample grows about "
         "linearly in n at fixed r/n and k",
         false},
        {"overlay-trend",
         "the overlay of prefix k-environment polygons has quasi-linear complexity in n",
         false},
    };
    return table;
}

const ExperimentInfo* find_experiment(const std::string& name) {
    for (const ExperimentInfo& info : registry())
        if (info.name == name) return &info;
    return nullptr;
}

}  // namespace

const std::vector<ExperimentInfo>& registry_list() { return registry(); }

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "experiment") cfg.experiment = value.get<std::string>();
            else if (key == "n") cfg.n = value.get<int>();
            else if (key == "d") cfg.d = value.get<int>();
            else if (key == "k") cfg.k = value.get<int>();
            else if (key == "gamma") cfg.gamma = value.get<double>();
            else if (key == "trials") cfg.trials = value.get<int>();
            else if (key == "samples") cfg.samples = value.get<long long>();
            else if (key == "delta") cfg.delta = value.get<double>();
            else if (key == "c1") cfg.c1 = value.get<double>();
            else if (key == "r") cfg.r = value.get<int>();
            else if (key == "queries") cfg.queries = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<uint64_t>();
            else if (key == "out") cfg.out_path = value.get<std::string>();
            else if (key == "threads") cfg.threads = value.get<int>();
            else if (key == "dist") cfg.dist = dist_from_json(value);
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return cfg;
}

std::string ExperimentConfig::canonical_json() const {
    json j;  // nlohmann objects iterate in sorted key order, so dump() is canonical
    j["experiment"] = experiment;
    j["n"] = n;
    j["d"] = d;
    j["k"] = k;
    j["gamma"] = gamma;
    j["trials"] = trials;
    j["samples"] = samples;
    j["delta"] = delta;
    j["c1"] = c1;
    j["r"] = r;
    j["queries"] = queries;
    j["seed"] = seed;
    j["out"] = out_path;
    j["threads"] = threads;
    j["dist"] = dist ? dist_to_json(*dist) : json(nullptr);
    return j.dump();
}

void ExperimentConfig::apply_defaults() {
    if (gamma == 0.0) gamma = kTwoE;
    if (delta == 0.0) delta = 0.1;
    if (samples == 0) samples = 1'000'000;
    if (dist && dist->coords.size() == 1 && d > 1)
        dist->coords.resize(static_cast<size_t>(d), dist->coords.front());

    auto def = [](int& field, int value) {
        if (field == 0) field = value;
    };
    if (experiment == "vdelta") {
        if (trials < 0) trials = 1;
    } else if (experiment == "staircase-2d-mean" || experiment == "staircase-whp") {
        def(n, 4096);
        if (trials < 0) trials = 400;
    } else if (experiment == "backward-quicksort") {
        def(n, 10000);
        if (trials < 0) trials = 50;
    } else if (experiment == "backward-tail") {
        def(n, 1000);
        if (trials < 0) trials = 200;
    } else if (experiment == "candidate-vs-oracle") {
        def(n, 8);
        if (trials < 0) trials = 20;
        def(queries, 500);
    } else if (experiment == "containment" || experiment == "proxy-size") {
        def(n, 2048);
        if (trials < 0) trials = 20;
        def(queries, 200);
        if (k < 0) k = proxy_k(n, d, c1);
    } else if (experiment == "online-klevel") {
        def(n, 40);
        if (k < 0) k = 3;
        if (trials < 0) trials = 50;
    } else if (experiment == "edges-per-line") {
        def(n, 12);
        if (k < 0) k = 5;
        if (trials < 0) trials = 200;
    } else if (experiment == "moments") {
        def(n, 40);
        if (k < 0) k = 2;
        if (trials < 0) trials = 50;
        def(r, n / 2);
    } else if (experiment == "overlay-trend") {
        def(n, 32);
        if (k < 0) k = 2;
        if (trials < 0) trials = 10;
    }
}

void ExperimentConfig::validate() const {
    const ExperimentInfo* info = find_experiment(experiment);
    if (!info) throw ConfigError("unknown experiment: '" + experiment + "'");
    if (trials < 0) throw ConfigError("trials must be >= 0");
    if (threads < 1 || threads > 256) throw ConfigError("threads must be in [1, 256]");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (dist) {
        try {
            dist->validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("invalid attribute distribution: ") + e.what());
        }
        if (dist->dim() != d)
            throw ConfigError("attribute distribution dimension must match d");
    }

    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    };
    if (experiment == "vdelta") {
        require(delta > 0.0 && delta <= 1.0, "delta must be in (0, 1]");
        require(samples >= 1, "samples must be >= 1");
    } else if (experiment == "staircase-2d-mean") {
        require(n >= 1, "n must be >= 1");
        require(d == 2, "this experiment is two-dimensional; leave d at 2");
    } else if (experiment == "staircase-whp") {
        require(n >= 2, "n must be >= 2");
    } else if (experiment == "backward-quicksort") {
        require(n >= 1, "n must be >= 1");
    } else if (experiment == "backward-tail") {
        require(n >= 2, "n must be >= 2");
        require(gamma >= kTwoE, "gamma must be >= 2e");
    } else if (experiment == "candidate-vs-oracle") {
        require(n >= 2 && n <= 60, "n must be in [2, 60]");
        require(queries >= 1, "queries must be >= 1");
    } else if (experiment == "containment" || experiment == "proxy-size") {
        require(n >= 2, "n must be >= 2");
        require(k >= 1, "k must be >= 1");
        require(queries >= 1, "queries must be >= 1");
        require(c1 > 0.0, "c1 must be positive");
    } else if (experiment == "online-klevel") {
        require(n >= 1, "n must be >= 1");
        require(k >= 0, "k must be >= 0");
    } else if (experiment == "edges-per-line") {
        require(n >= 1, "n must be >= 1");
        require(k >= 0, "k must be >= 0");
    } else if (experiment == "moments") {
        require(n >= 2 && n <= 80, "n must be in [2, 80]");
        require(r >= 0 && r <= n, "r must be in [0, n]");
        require(k >= 0, "k must be >= 0");
    } else if (experiment == "overlay-trend") {
        require(n >= 2 && n <= 64, "n must be in [2, 64]");
        require(k >= 1, "k must be >= 1");
    }
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ULL;
    for (const char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string_view version_string() { return "pplab 0.1.0"; }

std::string RunManifest::to_json_text() const {
    json j;
    j["experiment"] = experiment;
    j["config_digest"] = config_digest;
    j["base_seed"] = base_seed;
    j["version"] = version;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    j["row_count"] = row_count;
    return j.dump(2) + "\n";
}

RunOutput run_experiment(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    cfg.apply_defaults();
    cfg.validate();

    RunOutput out;
    out.manifest.experiment = cfg.experiment;
    out.manifest.config_digest = hex16(fnv1a64(cfg.canonical_json()));
    out.manifest.base_seed = cfg.seed;
    out.manifest.version = std::string(version_string());
    out.manifest.started_utc = iso_utc_now();

    if (cfg.experiment == "vdelta") out.result = run_vdelta(cfg);
    else if (cfg.experiment == "staircase-2d-mean") out.result = run_staircase_mean(cfg);
    else if (cfg.experiment == "staircase-whp") out.result = run_staircase_whp(cfg);
    else if (cfg.experiment == "backward-quicksort") out.result = run_backward_quicksort(cfg);
    else if (cfg.experiment == "backward-tail") out.result = run_backward_tail(cfg);
    else if (cfg.experiment == "candidate-vs-oracle") out.result = run_candidate_vs_oracle(cfg);
    else if (cfg.experiment == "containment") out.result = run_containment(cfg);
    else if (cfg.experiment == "proxy-size") out.result = run_proxy_size(cfg);
    else if (cfg.experiment == "online-klevel") out.result = run_online_klevel(cfg);
    else if (cfg.experiment == "edges-per-line") out.result = run_edges_per_line(cfg);
    else if (cfg.experiment == "moments") out.result = run_moments(cfg);
    else if (cfg.experiment == "overlay-trend") out.result = run_overlay_trend(cfg);
    else throw ConfigError("unknown experiment: '" + cfg.experiment + "'");

    out.result.experiment = cfg.experiment;
    out.result.hard = find_experiment(cfg.experiment)->hard;
    if (out.result.rows.empty() && cfg.trials == 0)
        out.result.notes.push_back("no trials requested; empty result");
    out.manifest.finished_utc = iso_utc_now();
    out.manifest.row_count = static_cast<long long>(out.result.rows.size());
    return out;
}

void write_csv(const ExperimentResult& result, std::ostream& os) {
    for (size_t i = 0; i < result.columns.size(); ++i)
        os << (i ? "," : "") << result.columns[i];
    os << '\n';
    char buf[64];
    for (const std::vector<double>& row : result.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.9g", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << '\n';
    }
}

}  // namespace pplab
