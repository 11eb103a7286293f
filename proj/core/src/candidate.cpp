#include "pplab/candidate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "pplab/arrangement.hpp"
#include "pplab/staircase.hpp"

namespace pplab {

namespace {

std::unordered_map<int, int> index_by_id(const SiteSet& s) {
    std::unordered_map<int, int> m;
    m.reserve(s.sites.size());
    for (int i = 0; i < s.size(); ++i) m.emplace(s.sites[static_cast<size_t>(i)].id, i);
    return m;
}

}  // namespace

CandidateSet candidate_set(const PlanePoint& x, const SiteSet& s) {
    if (s.sites.empty()) throw std::invalid_argument("candidate_set: empty site set");

    CandidateSet out;
    out.query = x;

    PointCloud cloud;
    cloud.dim = s.dim + 1;
    cloud.points.reserve(s.sites.size());
    std::vector<double> dists;
    dists.reserve(s.sites.size());
    for (const Site& site : s.sites) {
        CloudPoint c;
        c.id = site.id;
        c.p.coords = site.attrs.coords;
        const double d = dist(x, site);
        c.p.coords.push_back(d);
        dists.push_back(d);
        cloud.points.push_back(std::move(c));
    }
    std::sort(dists.begin(), dists.end());
    out.distance_tie = std::adjacent_find(dists.begin(), dists.end()) != dists.end();

    out.member_ids = staircase(cloud);
    return out;
}

ProxySet proxy_set(const PlanePoint& x, const SiteSet& s, int k) {
    const std::vector<int> order = volume_ordering(s);
    return proxy_set(x, s, k, order);
}

ProxySet proxy_set(const PlanePoint& x, const SiteSet& s, int k,
                   std::span<const int> volume_order) {
    if (k < 1) throw std::invalid_argument("proxy_set: k must be >= 1");
    if (static_cast<int>(volume_order.size()) != s.size())
        throw std::invalid_argument("proxy_set: ordering size mismatch");

    ProxySet out;
    out.query = x;
    out.k = k;

    // A site enters the proxy iff it is among the k nearest of its own
    // prefix; once evicted from the k nearest it can never re-enter, so one
    // bounded max-heap sweep in volume order collects the whole union.
    using Entry = std::pair<double, int>;  // (squared distance, id), max on top
    std::priority_queue<Entry> heap;
    const auto by_id = index_by_id(s);
    for (const int id : volume_order) {
        const Site& site = s.sites[static_cast<size_t>(by_id.at(id))];
        const Entry e{dist_sq(x, site.loc), id};
        if (static_cast<int>(heap.size()) < k) {
            heap.push(e);
            out.member_ids.push_back(id);
        } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
            out.member_ids.push_back(id);
        }
    }
    std::sort(out.member_ids.begin(), out.member_ids.end());
    return out;
}

std::vector<std::pair<PlanePoint, int>> containment_violations(
    const SiteSet& s, int k, std::span<const PlanePoint> queries) {
    const std::vector<int> order = volume_ordering(s);
    std::vector<std::pair<PlanePoint, int>> out;
    for (const PlanePoint& q : queries) {
        const CandidateSet cand = candidate_set(q, s);
        const ProxySet prox = proxy_set(q, s, k, order);
        for (const int id : cand.member_ids)
            if (!std::binary_search(prox.member_ids.begin(), prox.member_ids.end(), id))
                out.emplace_back(q, id);
    }
    return out;
}

bool env_membership(const PlanePoint& x, int site_id, const SiteSet& s, int k) {
    if (k < 1) throw std::invalid_argument("env_membership: k must be >= 1");
    const Site& me = s.sites[static_cast<size_t>(s.index_of(site_id))];
    const double my_d = dist_sq(x, me.loc);
    int closer = 0;
    for (const Site& other : s.sites) {
        if (other.id == site_id) continue;
        const double d = dist_sq(x, other.loc);
        if (d < my_d || (d == my_d && other.id < site_id)) ++closer;
    }
    return closer <= k - 1;
}

namespace {

StarPolygon bbox_polygon(int site_id, const PlanePoint& center, const BBox& box) {
    StarPolygon p;
    p.center_id = site_id;
    p.center = center;
    p.vertices = {{box.xmin, box.ymin}, {box.xmax, box.ymin}, {box.xmax, box.ymax},
                  {box.xmin, box.ymax}};
    p.is_bbox = true;
    return p;
}

double polygon_area2(const std::vector<PlanePoint>& v) {
    double a = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const PlanePoint& p = v[i];
        const PlanePoint& q = v[(i + 1) % v.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return a;
}

}  // namespace

StarPolygon k_environment_polygon(int site_id, const SiteSet& s, int k, const BBox& bbox) {
    if (k < 1) throw std::invalid_argument("k_environment_polygon: k must be >= 1");
    const Site& me = s.sites[static_cast<size_t>(s.index_of(site_id))];
    for (const Site& st : s.sites)
        if (!bbox.contains(st.loc))
            throw std::invalid_argument("k_environment_polygon: bbox must contain all sites");
    if (k >= s.size()) return bbox_polygon(site_id, me.loc, bbox);

    std::vector<Line> lines;
    lines.reserve(static_cast<size_t>(s.size() - 1));
    for (const Site& other : s.sites)
        if (other.id != site_id) lines.push_back(bisector(me, other));

    const PlanarSubdivision sub = build_arrangement(std::move(lines), bbox, /*expand_bbox=*/false);

    // A face qualifies when its representative sees at most k-1 sites closer
    // than the center (equivalently: the segment from the center crosses at
    // most k-1 of the bisectors).
    std::vector<char> qualifies(sub.faces.size(), 0);
    size_t qualifying = 0;
    for (size_t f = 0; f < sub.faces.size(); ++f) {
        int closer = 0;
        const PlanePoint rep = sub.faces[f].rep;
        const double my_d = dist_sq(rep, me.loc);
        for (const Site& other : s.sites) {
            if (other.id == site_id) continue;
            if (dist_sq(rep, other.loc) < my_d) ++closer;
        }
        if (closer <= k - 1) {
            qualifies[f] = 1;
            ++qualifying;
        }
    }
    if (qualifying == sub.faces.size()) {
        StarPolygon p = bbox_polygon(site_id, me.loc, bbox);
        p.is_bbox = false;  // natural boundary happens to be the box
        return p;
    }

    // boundary edges: qualifying on exactly one side (outside the box counts
    // as non-qualifying)
    auto q = [&](int face) { return face >= 0 && qualifies[static_cast<size_t>(face)]; };
    std::vector<std::pair<int, int>> boundary;  // (u, v) vertex ids
    std::map<int, std::vector<size_t>> at_vertex;
    for (const auto& e : sub.edges) {
        if (q(e.face_left) == q(e.face_right)) continue;
        at_vertex[e.u].push_back(boundary.size());
        at_vertex[e.v].push_back(boundary.size());
        boundary.emplace_back(e.u, e.v);
    }
    if (boundary.empty())
        throw std::runtime_error("k_environment_polygon: empty boundary");
    for (const auto& [v, inc] : at_vertex)
        if (inc.size() != 2)
            throw std::runtime_error("k_environment_polygon: boundary is not a simple cycle "
                                     "(degenerate input)");

    // chain the segments into one closed cycle
    std::vector<char> used(boundary.size(), 0);
    std::vector<int> cycle;
    int vstart = boundary.front().first;
    int vcur = vstart;
    size_t ecur = 0;
    used[0] = 1;
    cycle.push_back(vstart);
    int vnext = boundary.front().second;
    while (vnext != vstart) {
        cycle.push_back(vnext);
        const auto& inc = at_vertex[vnext];
        const size_t follow = inc[0] == ecur ? inc[1] : inc[0];
        if (used[follow])
            throw std::runtime_error("k_environment_polygon: boundary closed early "
                                     "(multiple cycles)");
        used[follow] = 1;
        vcur = vnext;
        vnext = boundary[follow].first == vcur ? boundary[follow].second : boundary[follow].first;
        ecur = follow;
    }
    if (std::count(used.begin(), used.end(), 1) != static_cast<long>(boundary.size()))
        throw std::runtime_error("k_environment_polygon: boundary has multiple cycles");

    StarPolygon poly;
    poly.center_id = site_id;
    poly.center = me.loc;
    poly.vertices.reserve(cycle.size());
    for (const int v : cycle) poly.vertices.push_back(sub.vertices[static_cast<size_t>(v)].pos);
    if (polygon_area2(poly.vertices) < 0.0)
        std::reverse(poly.vertices.begin(), poly.vertices.end());
    return poly;
}

bool polygon_contains(const StarPolygon& poly, const PlanePoint& p) {
    bool inside = false;
    const auto& v = poly.vertices;
    for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double xint =
                v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool closer_count_monotone_along_rays(int site_id, const SiteSet& s, const BBox& bbox,
                                      int rays) {
    const Site& me = s.sites[static_cast<size_t>(s.index_of(site_id))];
    if (!bbox.contains(me.loc))
        throw std::invalid_argument("closer_count_monotone_along_rays: site outside bbox");

    auto closer_count = [&](const PlanePoint& x) {
        const double my_d = dist_sq(x, me.loc);
        int c = 0;
        for (const Site& other : s.sites)
            if (other.id != site_id && dist_sq(x, other.loc) < my_d) ++c;
        return c;
    };

    for (int r = 0; r < rays; ++r) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(rays);
        const double dx = std::cos(ang), dy = std::sin(ang);

        // exit parameter from the box
        double t_exit = std::numeric_limits<double>::infinity();
        if (dx > 0) t_exit = std::min(t_exit, (bbox.xmax - me.loc.x) / dx);
        if (dx < 0) t_exit = std::min(t_exit, (bbox.xmin - me.loc.x) / dx);
        if (dy > 0) t_exit = std::min(t_exit, (bbox.ymax - me.loc.y) / dy);
        if (dy < 0) t_exit = std::min(t_exit, (bbox.ymin - me.loc.y) / dy);
        if (!std::isfinite(t_exit) || t_exit <= 0.0) continue;

        // bisector crossing parameters: dist to center == dist to other
        std::vector<double> ts{0.0, t_exit};
        for (const Site& other : s.sites) {
            if (other.id == site_id) continue;
            // |p(t)-me|^2 = |p(t)-other|^2, p(t) = me + t*(dx,dy):
            // t^2 = |me+t d - other|^2  =>  linear in t
            const double mx = me.loc.x - other.loc.x, my = me.loc.y - other.loc.y;
            const double denom = 2.0 * (dx * mx + dy * my);
            if (std::abs(denom) < 1e-15) continue;  // ray parallel to the bisector
            const double t = -(mx * mx + my * my) / denom;
            if (t > 0.0 && t < t_exit) ts.push_back(t);
        }
        std::sort(ts.begin(), ts.end());

        int prev = -1;
        for (size_t i = 0; i + 1 < ts.size(); ++i) {
            const double tm = 0.5 * (ts[i] + ts[i + 1]);
            const PlanePoint p{me.loc.x + tm * dx, me.loc.y + tm * dy};
            const int c = closer_count(p);
            if (c < prev) return false;
            prev = c;
        }
    }
    return true;
}

// ---- overlay ----------------------------------------------------------------

namespace {

struct Seg {
    PlanePoint a, b;
};

}  // namespace

OverlayComplexity proxy_overlay_complexity(const SiteSet& s, int k, const BBox& bbox) {
    if (k < 1) throw std::invalid_argument("proxy_overlay_complexity: k must be >= 1");
    const std::vector<int> order = volume_ordering(s);

    std::vector<Seg> segs;
    SiteSet prefix;
    prefix.dim = s.dim;
    for (const int id : order) {
        prefix.sites.push_back(s.sites[static_cast<size_t>(s.index_of(id))]);
        const StarPolygon poly = k_environment_polygon(id, prefix, k, bbox);
        const auto& v = poly.vertices;
        for (size_t i = 0; i < v.size(); ++i) segs.push_back({v[i], v[(i + 1) % v.size()]});
    }

    const double snap = 1e-9 * (1.0 + std::hypot(bbox.width(), bbox.height()));

    // point pool: segment endpoints plus pairwise crossings, snap-deduped
    std::vector<PlanePoint> pool;
    for (const Seg& g : segs) {
        pool.push_back(g.a);
        pool.push_back(g.b);
    }
    for (size_t i = 0; i < segs.size(); ++i)
        for (size_t j = i + 1; j < segs.size(); ++j) {
            const Seg&p = segs[i];
            const Seg& q = segs[j];
            const double rx = p.b.x - p.a.x, ry = p.b.y - p.a.y;
            const double sx = q.b.x - q.a.x, sy = q.b.y - q.a.y;
            const double det = rx * sy - ry * sx;
            if (std::abs(det) < 1e-14) continue;  // parallel (collinear overlaps
                                                  // handled by endpoint splitting)
            const double qpx = q.a.x - p.a.x, qpy = q.a.y - p.a.y;
            const double t = (qpx * sy - qpy * sx) / det;
            const double u = (qpx * ry - qpy * rx) / det;
            if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12) continue;
            pool.push_back({p.a.x + t * rx, p.a.y + t * ry});
        }

    // snap-dedup the pool
    std::vector<int> remap(pool.size(), -1);
    std::vector<PlanePoint> pts;
    {
        std::vector<int> idx(pool.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return pool[static_cast<size_t>(a)].x != pool[static_cast<size_t>(b)].x
                       ? pool[static_cast<size_t>(a)].x < pool[static_cast<size_t>(b)].x
                       : pool[static_cast<size_t>(a)].y < pool[static_cast<size_t>(b)].y;
        });
        for (size_t r = 0; r < idx.size(); ++r) {
            const PlanePoint p = pool[static_cast<size_t>(idx[r])];
            int found = -1;
            // look back among recently placed distinct points
            for (size_t back = r; back-- > 0;) {
                const PlanePoint q = pool[static_cast<size_t>(idx[back])];
                if (p.x - q.x > snap) break;
                const int cand = remap[static_cast<size_t>(idx[back])];
                if (cand >= 0 && dist_sq(p, pts[static_cast<size_t>(cand)]) <= snap * snap) {
                    found = cand;
                    break;
                }
            }
            if (found < 0) {
                pts.push_back(p);
                found = static_cast<int>(pts.size()) - 1;
            }
            remap[static_cast<size_t>(idx[r])] = found;
        }
    }

    // split every segment at the pool points on it; dedup subsegments
    std::set<std::pair<int, int>> sub_edges;
    for (const Seg& g : segs) {
        const double rx = g.b.x - g.a.x, ry = g.b.y - g.a.y;
        const double len2 = rx * rx + ry * ry;
        if (len2 < snap * snap) continue;
        std::vector<std::pair<double, int>> on;
        for (size_t pi = 0; pi < pts.size(); ++pi) {
            const double wx = pts[pi].x - g.a.x, wy = pts[pi].y - g.a.y;
            const double t = (wx * rx + wy * ry) / len2;
            if (t < -1e-12 || t > 1.0 + 1e-12) continue;
            const double px = g.a.x + t * rx - pts[pi].x, py = g.a.y + t * ry - pts[pi].y;
            if (px * px + py * py > snap * snap) continue;
            on.emplace_back(t, static_cast<int>(pi));
        }
        std::sort(on.begin(), on.end());
        for (size_t i = 0; i + 1 < on.size(); ++i) {
            const int a = on[i].second, b = on[i + 1].second;
            if (a == b) continue;
            sub_edges.emplace(std::min(a, b), std::max(a, b));
        }
    }

    // connected components over the used points
    std::vector<int> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    };
    std::set<int> used_pts;
    for (const auto& [a, b] : sub_edges) {
        used_pts.insert(a);
        used_pts.insert(b);
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<size_t>(ra)] = rb;
    }
    std::set<int> roots;
    for (const int p : used_pts) roots.insert(find(p));

    OverlayComplexity out;
    out.vertices = static_cast<long long>(used_pts.size());
    out.edges = static_cast<long long>(sub_edges.size());
    out.components = static_cast<int>(roots.size());
    out.faces = 2LL * out.components + out.edges - out.vertices;
    return out;
}

int proxy_k(int n, int d, double c1) {
    if (n < 2 || d < 1 || c1 <= 0.0) throw std::invalid_argument("proxy_k: bad parameters");
    const double ln_n = std::log(static_cast<double>(n));
    double p = 1.0;
    for (int i = 0; i < d; ++i) p *= ln_n;
    return static_cast<int>(std::ceil(c1 * p));
}

}  // namespace pplab
