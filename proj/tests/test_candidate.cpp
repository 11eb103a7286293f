#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "pplab/arrangement.hpp"
#include "pplab/candidate.hpp"
#include "pplab/geometry.hpp"
#include "pplab/random_model.hpp"

using namespace pplab;

namespace {

Site site(int id, double x, double y, std::vector<double> coords) {
    return Site{id, {x, y}, AttrPoint{std::move(coords)}};
}

// Pairwise brute-force oracle: keep s_i unless some s_j is at least as close
// with dominating attributes (ties broken toward the smaller id).
std::vector<int> candidate_oracle(const PlanePoint& x, const SiteSet& s) {
    std::vector<int> ids;
    for (const Site& a : s.sites) {
        bool excluded = false;
        for (const Site& b : s.sites) {
            if (b.id == a.id) continue;
            const double da = dist_sq(x, a.loc), db = dist_sq(x, b.loc);
            const bool closer = db < da || (db == da && b.id < a.id);
            if (!closer) continue;
            if (!dominates(b.attrs, a.attrs)) continue;
            // exact attr ties resolved by id, matching simulated general position
            if (b.attrs.coords == a.attrs.coords && b.id > a.id) continue;
            excluded = true;
        }
        if (!excluded) ids.push_back(a.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

SiteSet prefix_set(const SiteSet& s, std::span<const int> order, int len) {
    SiteSet p;
    p.dim = s.dim;
    for (int i = 0; i < len; ++i)
        p.sites.push_back(s.sites[static_cast<size_t>(s.index_of(order[static_cast<size_t>(i)]))]);
    return p;
}

double polygon_area(const StarPolygon& poly) {
    double twice = 0.0;
    const auto& v = poly.vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        const PlanePoint& a = v[i];
        const PlanePoint& b = v[(i + 1) % v.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::abs(twice);
}

double dist_point_segment(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b) {
    const double rx = b.x - a.x, ry = b.y - a.y;
    const double len2 = rx * rx + ry * ry;
    double t = len2 > 0 ? ((p.x - a.x) * rx + (p.y - a.y) * ry) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const PlanePoint q{a.x + t * rx, a.y + t * ry};
    return dist(p, q);
}

double dist_to_boundary(const StarPolygon& poly, const PlanePoint& p) {
    double best = 1e300;
    const auto& v = poly.vertices;
    for (size_t i = 0; i < v.size(); ++i)
        best = std::min(best, dist_point_segment(p, v[i], v[(i + 1) % v.size()]));
    return best;
}

}  // namespace

TEST_CASE("candidate_set: single site and full domination") {
    SiteSet one;
    one.dim = 2;
    one.sites.push_back(site(4, 0.5, 0.5, {0.3, 0.7}));
    CHECK(candidate_set({0.1, 0.9}, one).member_ids == std::vector<int>{4});

    SiteSet two;
    two.dim = 2;
    two.sites.push_back(site(0, 0.3, 0.5, {0.2, 0.3}));  // closer to x and dominating
    two.sites.push_back(site(1, 0.9, 0.5, {0.6, 0.5}));
    CHECK(candidate_set({0.2, 0.5}, two).member_ids == std::vector<int>{0});
    // From the other side the dominated site is closer: both survive.
    CHECK(candidate_set({0.95, 0.5}, two).member_ids == std::vector<int>{0, 1});
}

TEST_CASE("candidate_set matches the pairwise oracle on random instances") {
    for (uint64_t trial = 0; trial < 25; ++trial) {
        const SiteSet s = sample_site_set(10, DistributionSpec::uniform(2), 100 + trial);
        SplitMix64 rng(200 + trial);
        for (int q = 0; q < 40; ++q) {
            const PlanePoint x{rng.next_double() * 2 - 0.5, rng.next_double() * 2 - 0.5};
            CHECK(candidate_set(x, s).member_ids == candidate_oracle(x, s));
        }
    }
}

TEST_CASE("candidate_set in higher attribute dimension matches the oracle") {
    for (uint64_t trial = 0; trial < 10; ++trial) {
        const SiteSet s = sample_site_set(12, DistributionSpec::uniform(3), 300 + trial);
        SplitMix64 rng(400 + trial);
        for (int q = 0; q < 20; ++q) {
            const PlanePoint x{rng.next_double(), rng.next_double()};
            CHECK(candidate_set(x, s).member_ids == candidate_oracle(x, s));
        }
    }
}

TEST_CASE("candidate_set flags exact distance ties") {
    SiteSet s;
    s.dim = 1;
    s.sites.push_back(site(0, 0.0, 1.0, {0.3}));
    s.sites.push_back(site(1, 0.0, -1.0, {0.6}));
    const CandidateSet cs = candidate_set({0.3, 0.0}, s);
    CHECK(cs.distance_tie);
    // Equidistant, and site 0 dominates: id tie-breaking keeps only site 0.
    CHECK(cs.member_ids == std::vector<int>{0});

    const CandidateSet off = candidate_set({0.3, 0.2}, s);
    CHECK_FALSE(off.distance_tie);
}

TEST_CASE("candidate_set is invariant under monotone attribute remapping") {
    const SiteSet s = sample_site_set(15, DistributionSpec::uniform(2), 500);
    SiteSet mapped = s;
    for (Site& st : mapped.sites)
        st.attrs[0] = st.attrs[0] * st.attrs[0] * 0.9 + 0.05 * st.attrs[0];
    SplitMix64 rng(501);
    for (int q = 0; q < 50; ++q) {
        const PlanePoint x{rng.next_double() * 2 - 0.5, rng.next_double() * 2 - 0.5};
        CHECK(candidate_set(x, s).member_ids == candidate_set(x, mapped).member_ids);
    }
}

TEST_CASE("proxy_set: k = n returns every site") {
    const SiteSet s = sample_site_set(20, DistributionSpec::uniform(2), 7);
    const ProxySet p = proxy_set({0.5, 0.5}, s, 20);
    CHECK(p.member_ids.size() == 20);
    CHECK(p.k == 20);
}

TEST_CASE("proxy_set: k = 1 keeps each successively nearer site") {
    // Volume order s0, s1, s2 with distances to the query 3, 2, 1: each is
    // the nearest of its own prefix, so all three join the proxy.
    SiteSet s;
    s.dim = 2;
    s.sites.push_back(site(0, 3.0, 0.0, {0.1, 0.1}));
    s.sites.push_back(site(1, 0.0, 2.0, {0.3, 0.2}));
    s.sites.push_back(site(2, 1.0, 0.0, {0.5, 0.5}));
    CHECK(volume_ordering(s) == std::vector<int>{0, 1, 2});
    CHECK(proxy_set({0.0, 0.0}, s, 1).member_ids == std::vector<int>{0, 1, 2});
}

TEST_CASE("proxy_set equals the literal union of prefix k-nearest-neighbour sets") {
    const SiteSet s = sample_site_set(500, DistributionSpec::uniform(2), 808);
    const std::vector<int> order = volume_ordering(s);
    SplitMix64 rng(809);
    for (int q = 0; q < 3; ++q) {
        const PlanePoint x{rng.next_double(), rng.next_double()};
        std::set<int> expected;
        for (int len = 1; len <= s.size(); ++len) {
            const SiteSet prefix = prefix_set(s, order, len);
            for (int id : nearest_site_ids(x, prefix, std::min(10, len))) expected.insert(id);
        }
        CHECK(proxy_set(x, s, 10).member_ids ==
              std::vector<int>(expected.begin(), expected.end()));
    }
}

TEST_CASE("proxy_set is monotone in k and contains the candidate set at k = n") {
    const SiteSet s = sample_site_set(60, DistributionSpec::uniform(2), 21);
    SplitMix64 rng(22);
    for (int q = 0; q < 20; ++q) {
        const PlanePoint x{rng.next_double() * 2 - 0.5, rng.next_double() * 2 - 0.5};
        for (int k = 1; k < 8; ++k) {
            const std::vector<int> small = proxy_set(x, s, k).member_ids;
            const std::vector<int> big = proxy_set(x, s, k + 1).member_ids;
            CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
        }
        const std::vector<int> all = proxy_set(x, s, 60).member_ids;
        const std::vector<int> cand = candidate_set(x, s).member_ids;
        CHECK(std::includes(all.begin(), all.end(), cand.begin(), cand.end()));
    }
}

TEST_CASE("proxy_set respects the precomputed-ordering overload") {
    const SiteSet s = sample_site_set(50, DistributionSpec::uniform(2), 31);
    const std::vector<int> order = volume_ordering(s);
    const PlanePoint x{0.4, 0.6};
    CHECK(proxy_set(x, s, 5).member_ids == proxy_set(x, s, 5, order).member_ids);
}

TEST_CASE("proxy sizes stay below 2 k ln n at sampled queries") {
    const int n = 256;
    const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 47);
    const int k = proxy_k(n, 2);
    const double bound = 2.0 * k * std::log(static_cast<double>(n));
    SplitMix64 rng(48);
    for (int q = 0; q < 100; ++q) {
        const PlanePoint x{rng.next_double() * 3 - 1, rng.next_double() * 3 - 1};
        CHECK(static_cast<double>(proxy_set(x, s, k).member_ids.size()) <= bound);
    }
}

TEST_CASE("containment_violations: trivial cases are empty") {
    const SiteSet s = sample_site_set(30, DistributionSpec::uniform(2), 9);
    std::vector<PlanePoint> queries;
    SplitMix64 rng(10);
    for (int q = 0; q < 50; ++q) queries.push_back({rng.next_double(), rng.next_double()});
    CHECK(containment_violations(s, 30, queries).empty());  // proxy is everything

    SiteSet one;
    one.dim = 2;
    one.sites.push_back(site(0, 0.5, 0.5, {0.5, 0.5}));
    CHECK(containment_violations(one, 1, queries).empty());
}

TEST_CASE("containment holds at k = ceil(2 ln^2 n) on desk-scale instances") {
    const int n = 256;
    const int k = proxy_k(n, 2);
    for (uint64_t trial = 0; trial < 3; ++trial) {
        const SiteSet s = sample_site_set(n, DistributionSpec::uniform(2), 1100 + trial);
        const BBox box = default_diagram_bbox(s);
        SplitMix64 rng(1200 + trial);
        std::vector<PlanePoint> queries;
        for (int q = 0; q < 50; ++q)
            queries.push_back({box.xmin + box.width() * rng.next_double(),
                               box.ymin + box.height() * rng.next_double()});
        CHECK(containment_violations(s, k, queries).empty());
    }
}

TEST_CASE("proxy_k evaluates ceil(c1 ln^d n)") {
    CHECK(proxy_k(2048, 2) == 117);  // ceil(2 * ln^2 2048)
    CHECK(proxy_k(16, 2) == 16);
    CHECK(proxy_k(256, 2) == 62);
    CHECK_THROWS_AS(proxy_k(1, 2), std::invalid_argument);
}

TEST_CASE("env_membership: trivial cases") {
    const SiteSet s = sample_site_set(12, DistributionSpec::uniform(2), 61);
    for (const Site& st : s.sites) {
        CHECK(env_membership(st.loc, st.id, s, 1));
        CHECK(env_membership({0.1, 0.9}, st.id, s, 12));
    }
}

TEST_CASE("env_membership equals the bisector-crossing oracle") {
    const SiteSet s = sample_site_set(12, DistributionSpec::uniform(2), 62);
    SplitMix64 rng(63);
    for (int rep = 0; rep < 300; ++rep) {
        const PlanePoint x{rng.next_double() * 2 - 0.5, rng.next_double() * 2 - 0.5};
        const int id = static_cast<int>(rng.next_below(12));
        const Site& home = s.sites[static_cast<size_t>(s.index_of(id))];
        // Count bisectors of (home, other) crossed by the segment home -> x:
        // exactly the sites strictly closer to x than home is.
        int crossings = 0;
        for (const Site& other : s.sites) {
            if (other.id == id) continue;
            const Line b = bisector(home, other);
            if (b.side(home.loc) * b.side(x) < 0) ++crossings;
        }
        for (int k = 1; k <= 12; ++k)
            CHECK(env_membership(x, id, s, k) == (crossings <= k - 1));
    }
}

TEST_CASE("env_membership is monotone in k") {
    const SiteSet s = sample_site_set(10, DistributionSpec::uniform(2), 71);
    SplitMix64 rng(72);
    for (int rep = 0; rep < 100; ++rep) {
        const PlanePoint x{rng.next_double() * 2 - 0.5, rng.next_double() * 2 - 0.5};
        const int id = static_cast<int>(rng.next_below(10));
        for (int k = 1; k < 10; ++k)
            if (env_membership(x, id, s, k)) CHECK(env_membership(x, id, s, k + 1));
    }
}

TEST_CASE("k_environment_polygon: two sites give a half-plane clip") {
    SiteSet s;
    s.dim = 2;
    s.sites.push_back(site(0, 0.2, 0.5, {0.2, 0.2}));
    s.sites.push_back(site(1, 0.8, 0.5, {0.4, 0.6}));
    const BBox box{0, 0, 1, 1};
    const StarPolygon poly = k_environment_polygon(1, s, 1, box);
    CHECK_FALSE(poly.is_bbox);
    CHECK(poly.center_id == 1);
    // The half of the unit box right of x = 0.5.
    CHECK(polygon_area(poly) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(polygon_contains(poly, {0.7, 0.5}));
    CHECK_FALSE(polygon_contains(poly, {0.3, 0.5}));
}

TEST_CASE("k_environment_polygon: k >= n returns the box, flagged") {
    const SiteSet s = sample_site_set(5, DistributionSpec::uniform(2), 82);
    const BBox box = default_diagram_bbox(s);
    const StarPolygon poly = k_environment_polygon(s.sites[0].id, s, 7, box);
    CHECK(poly.is_bbox);
    CHECK(polygon_area(poly) == doctest::Approx(box.width() * box.height()).epsilon(1e-9));
}

TEST_CASE("k_environment_polygon: k = n-1 covers the box for an interior site") {
    // Four corner sites and one in the middle: the middle site is nowhere the
    // single farthest site, so with k = n-1 its environment is everything.
    SiteSet s;
    s.dim = 2;
    s.sites.push_back(site(0, 0.1, 0.1, {0.11, 0.3}));
    s.sites.push_back(site(1, 0.9, 0.12, {0.2, 0.5}));
    s.sites.push_back(site(2, 0.88, 0.9, {0.3, 0.2}));
    s.sites.push_back(site(3, 0.12, 0.88, {0.4, 0.7}));
    s.sites.push_back(site(4, 0.5, 0.48, {0.5, 0.4}));
    const BBox box{-0.5, -0.5, 1.5, 1.5};
    const StarPolygon poly = k_environment_polygon(4, s, 4, box);
    CHECK(polygon_area(poly) == doctest::Approx(box.width() * box.height()).epsilon(1e-6));
}

TEST_CASE("k_environment_polygon membership agrees with env_membership") {
    const SiteSet s = sample_site_set(8, DistributionSpec::uniform(2), 91);
    const BBox box = default_diagram_bbox(s);
    const int id = s.sites[3].id;
    const StarPolygon poly = k_environment_polygon(id, s, 2, box);
    SplitMix64 rng(92);
    int checked = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const PlanePoint p{box.xmin + box.width() * rng.next_double(),
                           box.ymin + box.height() * rng.next_double()};
        if (dist_to_boundary(poly, p) < 1e-6) continue;  // too close to call either way
        ++checked;
        CHECK(polygon_contains(poly, p) == env_membership(p, id, s, 2));
    }
    CHECK(checked > 950);
}

TEST_CASE("closer-site counts are monotone along rays from each site") {
    const SiteSet s = sample_site_set(16, DistributionSpec::uniform(2), 101);
    const BBox box = default_diagram_bbox(s);
    for (const Site& st : s.sites)
        CHECK(closer_count_monotone_along_rays(st.id, s, box, 90));
}

TEST_CASE("polygon_contains: axis-aligned square") {
    StarPolygon sq;
    sq.center = {0.5, 0.5};
    sq.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(polygon_contains(sq, {0.5, 0.5}));
    CHECK(polygon_contains(sq, {0.01, 0.99}));
    CHECK_FALSE(polygon_contains(sq, {1.5, 0.5}));
    CHECK_FALSE(polygon_contains(sq, {-0.2, 0.2}));
}

TEST_CASE("proxy_overlay_complexity: single site is one clipped box") {
    SiteSet s;
    s.dim = 2;
    s.sites.push_back(site(0, 0.5, 0.5, {0.5, 0.5}));
    const OverlayComplexity c = proxy_overlay_complexity(s, 1, BBox{0, 0, 1, 1});
    CHECK(c.vertices == 4);
    CHECK(c.edges == 4);
    CHECK(c.components == 1);
    CHECK(c.faces == 2);  // inside and outside
}

TEST_CASE("proxy_overlay_complexity: box plus half-plane, hand-counted") {
    SiteSet s;
    s.dim = 2;
    s.sites.push_back(site(0, 0.2, 0.5, {0.2, 0.2}));  // volume order puts this first
    s.sites.push_back(site(1, 0.8, 0.5, {0.4, 0.6}));
    const OverlayComplexity c = proxy_overlay_complexity(s, 1, BBox{0, 0, 1, 1});
    // Box boundary with two chord endpoints inserted, plus the chord itself:
    // 6 vertices, 7 edges, and via Euler 3 faces.
    CHECK(c.vertices == 6);
    CHECK(c.edges == 7);
    CHECK(c.faces == 3);
}

TEST_CASE("proxy_overlay_complexity tracks an independent segment recount within factor 4") {
    for (uint64_t trial = 0; trial < 3; ++trial) {
        const SiteSet s = sample_site_set(16, DistributionSpec::uniform(2), 1500 + trial);
        const BBox box = default_diagram_bbox(s);
        const OverlayComplexity c = proxy_overlay_complexity(s, 2, box);

        // Recount: gather the same prefix polygons, then count endpoints,
        // proper crossings and induced subsegments with independent code
        // (bitwise segment dedup, exact-endpoint dedup, Euler for faces).
        const std::vector<int> order = volume_ordering(s);
        std::vector<std::pair<PlanePoint, PlanePoint>> segs;
        SiteSet prefix;
        prefix.dim = s.dim;
        for (int id : order) {
            prefix.sites.push_back(s.sites[static_cast<size_t>(s.index_of(id))]);
            const StarPolygon poly = k_environment_polygon(id, prefix, 2, box);
            const auto& v = poly.vertices;
            for (size_t i = 0; i < v.size(); ++i) {
                PlanePoint a = v[i], b = v[(i + 1) % v.size()];
                if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
                segs.emplace_back(a, b);
            }
        }
        std::sort(segs.begin(), segs.end(), [](const auto& p, const auto& q) {
            return std::tie(p.first.x, p.first.y, p.second.x, p.second.y) <
                   std::tie(q.first.x, q.first.y, q.second.x, q.second.y);
        });
        segs.erase(std::unique(segs.begin(), segs.end(),
                               [](const auto& p, const auto& q) {
                                   return p.first.x == q.first.x && p.first.y == q.first.y &&
                                          p.second.x == q.second.x && p.second.y == q.second.y;
                               }),
                   segs.end());

        std::set<std::pair<double, double>> endpoints;
        for (const auto& [a, b] : segs) {
            endpoints.insert({a.x, a.y});
            endpoints.insert({b.x, b.y});
        }
        long long crossings = 0;
        std::vector<int> cuts(segs.size(), 0);
        for (size_t i = 0; i < segs.size(); ++i)
            for (size_t j = i + 1; j < segs.size(); ++j) {
                const auto& [a, b] = segs[i];
                const auto& [p, q] = segs[j];
                const double rx = b.x - a.x, ry = b.y - a.y;
                const double sx = q.x - p.x, sy = q.y - p.y;
                const double det = rx * sy - ry * sx;
                if (std::abs(det) < 1e-14) continue;
                const double t = ((p.x - a.x) * sy - (p.y - a.y) * sx) / det;
                const double u = ((p.x - a.x) * ry - (p.y - a.y) * rx) / det;
                if (t <= 1e-9 || t >= 1 - 1e-9 || u <= 1e-9 || u >= 1 - 1e-9) continue;
                ++crossings;
                ++cuts[i];
                ++cuts[j];
            }
        const long long v2 = static_cast<long long>(endpoints.size()) + crossings;
        long long e2 = 0;
        for (size_t i = 0; i < segs.size(); ++i) e2 += 1 + cuts[i];
        const long long f2 = 2 + e2 - v2;  // single-component Euler estimate
        const long long total2 = v2 + e2 + std::max(f2, 1LL);

        const double ratio = static_cast<double>(c.total()) / static_cast<double>(total2);
        CHECK(ratio >= 0.25);
        CHECK(ratio <= 4.0);
    }
}

TEST_CASE("overlay complexity grows with the instance") {
    const SiteSet small = sample_site_set(4, DistributionSpec::uniform(2), 1600);
    const SiteSet large = sample_site_set(16, DistributionSpec::uniform(2), 1601);
    const OverlayComplexity cs = proxy_overlay_complexity(small, 2, default_diagram_bbox(small));
    const OverlayComplexity cl = proxy_overlay_complexity(large, 2, default_diagram_bbox(large));
    CHECK(cs.total() > 0);
    CHECK(cl.total() > cs.total());
}
