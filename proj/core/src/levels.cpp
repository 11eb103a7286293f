#include "pplab/levels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

namespace pplab {

namespace {

constexpr double kSlopeTol = 1e-12;  // below this slope difference, lines are parallel

// x coordinate where two lines cross; nullopt for (near-)parallel lines.
std::optional<double> cross_x(const LevelLine& a, const LevelLine& b) {
    const double dm = a.slope - b.slope;
    if (std::abs(dm) < kSlopeTol) return std::nullopt;
    return (b.offset - a.offset) / dm;
}

// Lines strictly below the point of lines[i] at coordinate x.  Exact ties
// (another line through that very point) count as not-below; interval
// midpoints in general position never produce them.
int level_on_line(std::span<const LevelLine> lines, int i, double x) {
    const double y = lines[static_cast<size_t>(i)].y_at(x);
    int below = 0;
    for (int j = 0; j < static_cast<int>(lines.size()); ++j) {
        if (j == i) continue;
        if (lines[static_cast<size_t>(j)].y_at(x) < y) ++below;
    }
    return below;
}

struct Crossing {
    double x;
    int partner;
};

// Every arrangement interval on lines[i], in left-to-right order, with the
// level of its interior.  Crossings at numerically identical x (concurrent
// lines) collapse into one breakpoint so no zero-length interval appears.
std::vector<LineLevelEdge> line_intervals(std::span<const LevelLine> lines, int i) {
    std::vector<Crossing> cs;
    for (int j = 0; j < static_cast<int>(lines.size()); ++j) {
        if (j == i) continue;
        if (const auto x = cross_x(lines[static_cast<size_t>(i)], lines[static_cast<size_t>(j)]))
            cs.push_back({*x, j});
    }
    std::sort(cs.begin(), cs.end(), [](const Crossing& a, const Crossing& b) {
        return a.x < b.x || (a.x == b.x && a.partner < b.partner);
    });
    std::vector<Crossing> uniq;
    for (const Crossing& c : cs) {
        if (!uniq.empty() && c.x - uniq.back().x <= 1e-12 * (1.0 + std::abs(c.x))) continue;
        uniq.push_back(c);
    }

    std::vector<LineLevelEdge> out;
    auto make = [&](double lo, double hi, bool rlo, bool rhi, int plo, int phi, double probe_x) {
        LineLevelEdge e;
        e.line = i;
        e.x_lo = lo;
        e.x_hi = hi;
        e.ray_lo = rlo;
        e.ray_hi = rhi;
        e.partner_lo = plo;
        e.partner_hi = phi;
        e.level = level_on_line(lines, i, probe_x);
        out.push_back(e);
    };

    if (uniq.empty()) {
        make(0.0, 0.0, true, true, -1, -1, 0.0);
        return out;
    }
    make(0.0, uniq.front().x, true, false, -1, uniq.front().partner, uniq.front().x - 1.0);
    for (size_t t = 1; t < uniq.size(); ++t)
        make(uniq[t - 1].x, uniq[t].x, false, false, uniq[t - 1].partner, uniq[t].partner,
             0.5 * (uniq[t - 1].x + uniq[t].x));
    make(uniq.back().x, 0.0, false, true, uniq.back().partner, -1, uniq.back().x + 1.0);
    return out;
}

// Level-k intervals of one line, adjacent qualifying intervals merged into
// maximal edges.  (In general position adjacent intervals differ in level, so
// merging only ever fires across a collapsed concurrent breakpoint.)
std::vector<LineLevelEdge> line_k_edges(std::span<const LevelLine> lines, int i, int k) {
    std::vector<LineLevelEdge> merged;
    bool open = false;
    for (const LineLevelEdge& e : line_intervals(lines, i)) {
        if (e.level != k) {
            open = false;
            continue;
        }
        if (open) {
            merged.back().x_hi = e.x_hi;
            merged.back().ray_hi = e.ray_hi;
            merged.back().partner_hi = e.partner_hi;
        } else {
            merged.push_back(e);
            open = true;
        }
    }
    return merged;
}

void check_line_args(std::span<const LevelLine> lines, int k) {
    if (k < 0) throw std::invalid_argument("level index k must be >= 0");
    if (lines.empty()) throw std::invalid_argument("line set must be non-empty");
}

}  // namespace

PointLevel point_level_lines(std::span<const LevelLine> lines, PlanePoint p) {
    double scale = 1.0 + std::abs(p.y);
    for (const LevelLine& l : lines) scale = std::max(scale, std::abs(l.y_at(p.x)));
    const double tol = 1e-9 * scale;

    PointLevel out;
    double py = p.y;
    for (int attempt = 0; attempt < 64; ++attempt) {
        bool clear = true;
        for (const LevelLine& l : lines) {
            if (std::abs(l.y_at(p.x) - py) <= tol) {
                clear = false;
                break;
            }
        }
        if (clear) break;
        py += 2.0 * tol;  // deterministic upward nudge: touched lines count as below
        out.perturbed = true;
    }
    for (const LevelLine& l : lines)
        if (l.y_at(p.x) < py) ++out.level;
    return out;
}

std::vector<LineLevelEdge> k_level_edges_lines(std::span<const LevelLine> lines, int k) {
    check_line_args(lines, k);
    std::vector<LineLevelEdge> out;
    for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
        auto edges = line_k_edges(lines, i, k);
        out.insert(out.end(), edges.begin(), edges.end());
    }
    return out;
}

int edges_on_line_at_level(std::span<const LevelLine> lines, int line, int k) {
    check_line_args(lines, k);
    if (line < 0 || line >= static_cast<int>(lines.size()))
        throw std::invalid_argument("line index out of range");
    return static_cast<int>(line_k_edges(lines, line, k).size());
}

int incremental_k_level_vertices(std::span<const LevelLine> lines, std::span<const int> order,
                                 int k) {
    check_line_args(lines, k);
    const int n = static_cast<int>(lines.size());
    {
        std::vector<int> seen(static_cast<size_t>(n), 0);
        if (static_cast<int>(order.size()) != n)
            throw std::invalid_argument("insertion order must list every line once");
        for (const int idx : order) {
            if (idx < 0 || idx >= n || seen[static_cast<size_t>(idx)]++)
                throw std::invalid_argument("insertion order must be a permutation of the lines");
        }
    }

    std::vector<LevelLine> prefix;
    prefix.reserve(static_cast<size_t>(n));
    std::set<std::pair<int, int>> vertices;  // unordered pairs of original line indices
    auto canon = [&](int local_a, int local_b) {
        const int a = order[static_cast<size_t>(local_a)];
        const int b = order[static_cast<size_t>(local_b)];
        return std::pair<int, int>{std::min(a, b), std::max(a, b)};
    };
    for (int step = 0; step < n; ++step) {
        prefix.push_back(lines[static_cast<size_t>(order[static_cast<size_t>(step)])]);
        for (const LineLevelEdge& e : k_level_edges_lines(prefix, k)) {
            if (!e.ray_lo) vertices.insert(canon(e.line, e.partner_lo));
            if (!e.ray_hi) vertices.insert(canon(e.line, e.partner_hi));
        }
    }
    return static_cast<int>(vertices.size());
}

namespace {

constexpr int kMaxPlanes = 80;  // O(n^4) brute force guard

struct RawVertex {
    int i, j, k;  // defining triple, indices into the plane span
    double x, y, z;
    int level;
};

// All triple-intersection vertices by 2x2 Cramer on pairwise plane
// differences, with levels by direct evaluation over every other plane.
std::vector<RawVertex> raw_vertices(std::span<const LiftedPlane> planes) {
    const int n = static_cast<int>(planes.size());
    std::vector<RawVertex> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                const LiftedPlane &pi = planes[static_cast<size_t>(i)],
                                  &pj = planes[static_cast<size_t>(j)],
                                  &pk = planes[static_cast<size_t>(k)];
                const double a1 = pi.a - pj.a, b1 = pi.b - pj.b, c1 = pj.c - pi.c;
                const double a2 = pi.a - pk.a, b2 = pi.b - pk.b, c2 = pk.c - pi.c;
                const double det = a1 * b2 - b1 * a2;
                if (std::abs(det) < 1e-12) continue;  // no unique intersection
                const double x = (c1 * b2 - b1 * c2) / det;
                const double y = (a1 * c2 - c1 * a2) / det;
                const double z = pi.a * x + pi.b * y + pi.c;
                int level = 0;
                for (int l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    const LiftedPlane& pl = planes[static_cast<size_t>(l)];
                    if (pl.a * x + pl.b * y + pl.c < z) ++level;
                }
                out.push_back({i, j, k, x, y, z, level});
            }
        }
    }
    return out;
}

void check_planes(std::span<const LiftedPlane> planes) {
    if (static_cast<int>(planes.size()) > kMaxPlanes)
        throw std::invalid_argument("plane arrangement guard: at most 80 planes");
    std::vector<int> ids;
    ids.reserve(planes.size());
    for (const LiftedPlane& p : planes) ids.push_back(p.source_id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("plane source ids must be distinct");
}

std::array<int, 3> sorted_triple(int a, int b, int c) {
    std::array<int, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    return t;
}

}  // namespace

std::vector<PlaneArrangementVertex> enumerate_plane_vertices(
    std::span<const LiftedPlane> planes) {
    check_planes(planes);
    std::vector<PlaneArrangementVertex> out;
    for (const RawVertex& rv : raw_vertices(planes)) {
        PlaneArrangementVertex v;
        v.planes = sorted_triple(planes[static_cast<size_t>(rv.i)].source_id,
                                 planes[static_cast<size_t>(rv.j)].source_id,
                                 planes[static_cast<size_t>(rv.k)].source_id);
        v.x = rv.x;
        v.y = rv.y;
        v.z = rv.z;
        v.level = rv.level;
        out.push_back(std::move(v));
    }
    return out;
}

long long BelowConflict::vertex_b_sum() const {
    long long s = 0;
    for (const PlaneArrangementVertex& v : vertices)
        s += static_cast<long long>(v.below_ids.size());
    return s;
}

long long BelowConflict::edge_b_sum() const {
    long long s = 0;
    for (const ConflictEdge& e : edges) s += e.b_size;
    return s;
}

BelowConflict below_conflict_sizes(std::span<const LiftedPlane> all, std::span<const int> sample,
                                   int k) {
    check_planes(all);
    if (k < 0) throw std::invalid_argument("level index k must be >= 0");
    const int n = static_cast<int>(all.size());
    std::vector<char> in_sample(static_cast<size_t>(n), 0);
    for (const int idx : sample) {
        if (idx < 0 || idx >= n || in_sample[static_cast<size_t>(idx)])
            throw std::invalid_argument("sample must hold distinct indices into the plane set");
        in_sample[static_cast<size_t>(idx)] = 1;
    }

    std::vector<LiftedPlane> r_planes;
    r_planes.reserve(sample.size());
    for (const int idx : sample) r_planes.push_back(all[static_cast<size_t>(idx)]);

    // External planes strictly below a point, as sorted source ids.
    auto below_ids_at = [&](double x, double y, double z) {
        std::vector<int> ids;
        for (int g = 0; g < n; ++g) {
            if (in_sample[static_cast<size_t>(g)]) continue;
            const LiftedPlane& p = all[static_cast<size_t>(g)];
            if (p.a * x + p.b * y + p.c < z) ids.push_back(p.source_id);
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    };

    BelowConflict out;
    const std::vector<RawVertex> raw = raw_vertices(r_planes);
    for (const RawVertex& rv : raw) {
        if (rv.level > k) continue;
        PlaneArrangementVertex v;
        v.planes = sorted_triple(r_planes[static_cast<size_t>(rv.i)].source_id,
                                 r_planes[static_cast<size_t>(rv.j)].source_id,
                                 r_planes[static_cast<size_t>(rv.k)].source_id);
        v.x = rv.x;
        v.y = rv.y;
        v.z = rv.z;
        v.level = rv.level;
        v.below_ids = below_ids_at(rv.x, rv.y, rv.z);
        out.vertices.push_back(std::move(v));
    }

    // Clip box: every sample vertex plus each pair line's base point, margin 1.
    const int r = static_cast<int>(r_planes.size());
    std::array<double, 3> lo{0.0, 0.0, 0.0}, hi{0.0, 0.0, 0.0};
    bool box_seeded = false;
    auto extend = [&](double x, double y, double z) {
        const std::array<double, 3> p{x, y, z};
        if (!box_seeded) {
            lo = hi = p;
            box_seeded = true;
            return;
        }
        for (int a = 0; a < 3; ++a) {
            lo[static_cast<size_t>(a)] = std::min(lo[static_cast<size_t>(a)], p[static_cast<size_t>(a)]);
            hi[static_cast<size_t>(a)] = std::max(hi[static_cast<size_t>(a)], p[static_cast<size_t>(a)]);
        }
    };
    for (const RawVertex& rv : raw) extend(rv.x, rv.y, rv.z);

    struct PairLine {
        int pi, qi;            // defining pair, indices into r_planes
        double px, py;         // base point in the xy-plane
        double dx, dy;         // unit direction in the xy-plane
        double z0, dz;         // height along the line: z(t) = z0 + dz * t
    };
    std::vector<PairLine> pair_lines;
    for (int pi = 0; pi < r; ++pi) {
        for (int qi = pi + 1; qi < r; ++qi) {
            const LiftedPlane &p = r_planes[static_cast<size_t>(pi)],
                              &q = r_planes[static_cast<size_t>(qi)];
            const double A = p.a - q.a, B = p.b - q.b, C = q.c - p.c;  // A x + B y = C
            const double n2 = A * A + B * B;
            if (n2 < 1e-24) continue;  // parallel planes: no intersection line
            const double inv = 1.0 / std::sqrt(n2);
            PairLine pl;
            pl.pi = pi;
            pl.qi = qi;
            pl.px = A * C / n2;
            pl.py = B * C / n2;
            pl.dx = -B * inv;
            pl.dy = A * inv;
            pl.z0 = p.a * pl.px + p.b * pl.py + p.c;
            pl.dz = p.a * pl.dx + p.b * pl.dy;
            extend(pl.px, pl.py, pl.z0);
            pair_lines.push_back(pl);
        }
    }
    if (!box_seeded) return out;  // fewer than two usable sample planes
    for (int a = 0; a < 3; ++a) {
        lo[static_cast<size_t>(a)] -= 1.0;
        hi[static_cast<size_t>(a)] += 1.0;
    }

    for (const PairLine& pl : pair_lines) {
        // Slab-clip the line parameter to the box.
        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();
        const std::array<double, 3> base{pl.px, pl.py, pl.z0}, dir{pl.dx, pl.dy, pl.dz};
        bool miss = false;
        for (int a = 0; a < 3 && !miss; ++a) {
            const double b = base[static_cast<size_t>(a)], d = dir[static_cast<size_t>(a)];
            const double alo = lo[static_cast<size_t>(a)], ahi = hi[static_cast<size_t>(a)];
            if (std::abs(d) < 1e-15) {
                if (b < alo || b > ahi) miss = true;
            } else {
                const double ta = (alo - b) / d, tb = (ahi - b) / d;
                t0 = std::max(t0, std::min(ta, tb));
                t1 = std::min(t1, std::max(ta, tb));
            }
        }
        if (miss || t0 >= t1) continue;

        // Breakpoints: box ends plus crossings with every other sample plane.
        std::vector<double> ts{t0, t1};
        for (int l = 0; l < r; ++l) {
            if (l == pl.pi || l == pl.qi) continue;
            const LiftedPlane& h = r_planes[static_cast<size_t>(l)];
            const double beta = h.a * pl.dx + h.b * pl.dy - pl.dz;
            if (std::abs(beta) < 1e-12) continue;  // parallel to the line
            const double alpha = h.a * pl.px + h.b * pl.py + h.c - pl.z0;
            const double t = -alpha / beta;
            if (t > t0 && t < t1) ts.push_back(t);
        }
        std::sort(ts.begin(), ts.end());

        auto point_at = [&](double t) {
            return std::array<double, 3>{pl.px + t * pl.dx, pl.py + t * pl.dy,
                                         pl.z0 + t * pl.dz};
        };
        for (size_t s = 0; s + 1 < ts.size(); ++s) {
            const double ta = ts[s], tb = ts[s + 1];
            if (tb - ta <= 1e-12 * (1.0 + std::abs(ta))) continue;
            const auto mid = point_at(0.5 * (ta + tb));
            int level = 0;
            for (int l = 0; l < r; ++l) {
                if (l == pl.pi || l == pl.qi) continue;
                const LiftedPlane& h = r_planes[static_cast<size_t>(l)];
                if (h.a * mid[0] + h.b * mid[1] + h.c < mid[2]) ++level;
            }
            if (level > k) continue;

            ConflictEdge e;
            const int id1 = r_planes[static_cast<size_t>(pl.pi)].source_id;
            const int id2 = r_planes[static_cast<size_t>(pl.qi)].source_id;
            e.planes = {std::min(id1, id2), std::max(id1, id2)};
            e.a = point_at(ta);
            e.b = point_at(tb);
            e.clipped_a = (s == 0);
            e.clipped_b = (s + 2 == ts.size());
            e.level = level;
            const std::vector<int> ba = below_ids_at(e.a[0], e.a[1], e.a[2]);
            const std::vector<int> bb = below_ids_at(e.b[0], e.b[1], e.b[2]);
            std::vector<int> un;
            std::set_union(ba.begin(), ba.end(), bb.begin(), bb.end(), std::back_inserter(un));
            e.b_size = static_cast<int>(un.size());
            out.edges.push_back(std::move(e));
        }
    }
    return out;
}

MomentReport moment_experiment(int n, int r, int k, int trials, uint64_t seed) {
    if (n < 1 || n > kMaxPlanes)
        throw std::invalid_argument("moment experiment: n must be in [1, 80]");
    if (r < 0 || r > n) throw std::invalid_argument("moment experiment: r must be in [0, n]");
    if (k < 0) throw std::invalid_argument("moment experiment: k must be >= 0");
    if (trials < 0) throw std::invalid_argument("moment experiment: trials must be >= 0");

    MomentReport report;
    report.n = n;
    report.r = r;
    report.k = k;
    report.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const SiteSet sites =
            sample_site_set(n, DistributionSpec::uniform(1), mix_seed(seed, 2 * static_cast<uint64_t>(t)));
        std::vector<LiftedPlane> planes;
        planes.reserve(sites.sites.size());
        for (const Site& s : sites.sites) planes.push_back(lift(s));
        SplitMix64 pick(mix_seed(seed, 2 * static_cast<uint64_t>(t) + 1));
        const std::vector<int> sample = sample_without_replacement(n, r, pick);
        const BelowConflict bc = below_conflict_sizes(planes, sample, k);
        report.rows.push_back({t, bc.vertex_b_sum(), bc.edge_b_sum()});
    }

    auto mean_stderr = [&](auto field) {
        double mean = 0.0, se = 0.0;
        if (!report.rows.empty()) {
            for (const auto& row : report.rows) mean += static_cast<double>(field(row));
            mean /= static_cast<double>(report.rows.size());
            if (report.rows.size() >= 2) {
                double ss = 0.0;
                for (const auto& row : report.rows) {
                    const double dv = static_cast<double>(field(row)) - mean;
                    ss += dv * dv;
                }
                se = std::sqrt(ss / static_cast<double>(report.rows.size() - 1)) /
                     std::sqrt(static_cast<double>(report.rows.size()));
            }
        }
        return std::pair<double, double>{mean, se};
    };
    std::tie(report.vertex_mean, report.vertex_stderr) =
        mean_stderr([](const MomentReport::Row& row) { return row.vertex_sum; });
    std::tie(report.edge_mean, report.edge_stderr) =
        mean_stderr([](const MomentReport::Row& row) { return row.edge_sum; });
    return report;
}

std::vector<LevelLine> sample_level_lines(int m, SplitMix64& rng) {
    if (m < 0) throw std::invalid_argument("line count must be >= 0");
    std::vector<LevelLine> out;
    out.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double angle = -1.25 + 2.5 * rng.next_double();
        LevelLine l;
        l.slope = std::tan(angle);
        l.offset = -1.0 + 2.0 * rng.next_double();
        out.push_back(l);
    }
    return out;
}

}  // namespace pplab
