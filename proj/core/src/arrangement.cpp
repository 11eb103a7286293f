#include "pplab/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "pplab/candidate.hpp"

namespace pplab {

namespace {

constexpr double kParallelTol = 1e-12;
constexpr int kMaxLines = 2000;

double box_diag(const BBox& b) { return std::hypot(b.width(), b.height()); }

PlanePoint line_point(const Line& l, double t) {
    // p(t) = c*(a,b) + t*(-b,a)
    return {l.c * l.a - t * l.b, l.c * l.b + t * l.a};
}

double line_param(const Line& l, const PlanePoint& p) {
    return -l.b * (p.x - l.c * l.a) + l.a * (p.y - l.c * l.b);
}

struct Clip {
    bool hit = false;
    double t0 = 0.0, t1 = 0.0;  // entry/exit params along the line
    int side0 = 0, side1 = 0;   // side codes -1..-4
};

// Liang-Barsky clip of the full line against the box.
Clip clip_to_box(const Line& l, const BBox& box) {
    const double ox = l.c * l.a, oy = l.c * l.b;
    const double dx = -l.b, dy = l.a;
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    int side0 = 0, side1 = 0;

    // constraint: o + t*d >= bound (sign=+1) or <= bound (sign=-1)
    auto apply = [&](double o, double d, double bound, int sign, int side) -> bool {
        const double diff = sign > 0 ? o - bound : bound - o;
        const double slope = sign > 0 ? d : -d;
        if (std::abs(slope) < kParallelTol) return diff >= 0.0;
        const double t = -diff / slope;
        if (slope > 0.0) {  // satisfied for t >= t
            if (t > t0) { t0 = t; side0 = side; }
        } else {            // satisfied for t <= t
            if (t < t1) { t1 = t; side1 = side; }
        }
        return true;
    };

    Clip c;
    if (!apply(oy, dy, box.ymin, +1, -1)) return c;  // bottom
    if (!apply(ox, dx, box.xmax, -1, -2)) return c;  // right
    if (!apply(oy, dy, box.ymax, -1, -3)) return c;  // top
    if (!apply(ox, dx, box.xmin, +1, -4)) return c;  // left
    if (!(t0 < t1)) return c;
    c.hit = true;
    c.t0 = t0;
    c.t1 = t1;
    c.side0 = side0;
    c.side1 = side1;
    return c;
}

struct Crossing {
    int i = -1, j = -1;
    PlanePoint p;
};

bool intersect(const Line& a, const Line& b, PlanePoint& out) {
    const double det = a.a * b.b - b.a * a.b;
    if (std::abs(det) <= kParallelTol) return false;
    out.x = (a.c * b.b - b.c * a.b) / det;
    out.y = (a.a * b.c - b.a * a.c) / det;
    return true;
}

// any two special points closer than snap means a degenerate configuration
bool has_close_pair(std::vector<PlanePoint> pts, double snap) {
    std::sort(pts.begin(), pts.end(), [](const PlanePoint& a, const PlanePoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size() && pts[j].x - pts[i].x < snap; ++j)
            if (dist_sq(pts[i], pts[j]) < snap * snap) return true;
    return false;
}

bool scan_degenerate(const std::vector<Line>& lines, const BBox& box,
                     const std::vector<Crossing>& crossings, double snap) {
    for (size_t i = 0; i < lines.size(); ++i) {
        // coincident duplicate line
        for (size_t j = i + 1; j < lines.size(); ++j)
            if (std::abs(lines[i].a - lines[j].a) < kParallelTol &&
                std::abs(lines[i].b - lines[j].b) < kParallelTol &&
                std::abs(lines[i].c - lines[j].c) < snap)
                return true;
        // line collinear with a box side
        if (std::abs(lines[i].a) < kParallelTol) {
            const double y = lines[i].c * lines[i].b;
            if (std::abs(y - box.ymin) < snap || std::abs(y - box.ymax) < snap) return true;
        }
        if (std::abs(lines[i].b) < kParallelTol) {
            const double x = lines[i].c * lines[i].a;
            if (std::abs(x - box.xmin) < snap || std::abs(x - box.xmax) < snap) return true;
        }
    }

    std::vector<PlanePoint> special;
    special.reserve(crossings.size() + 2 * lines.size() + 4);
    for (const Crossing& c : crossings) special.push_back(c.p);
    for (const Line& l : lines) {
        const Clip c = clip_to_box(l, box);
        if (!c.hit) continue;
        special.push_back(line_point(l, c.t0));
        special.push_back(line_point(l, c.t1));
    }
    special.push_back({box.xmin, box.ymin});
    special.push_back({box.xmax, box.ymin});
    special.push_back({box.xmax, box.ymax});
    special.push_back({box.xmin, box.ymax});
    return has_close_pair(std::move(special), snap);
}

}  // namespace

Line make_line(double a, double b, double c) {
    const double n = std::hypot(a, b);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("make_line: degenerate coefficients");
    a /= n;
    b /= n;
    c /= n;
    if (a < 0.0 || (a == 0.0 && b < 0.0)) {
        a = -a;
        b = -b;
        c = -c;
    }
    if (a == 0.0) b = std::abs(b);  // normalize -0
    Line l;
    l.a = a;
    l.b = b;
    l.c = c;
    return l;
}

Line bisector(const Site& s1, const Site& s2) {
    const double dx = s2.loc.x - s1.loc.x, dy = s2.loc.y - s1.loc.y;
    if (dx == 0.0 && dy == 0.0)
        throw std::invalid_argument("bisector: sites share a location");
    const double c = 0.5 * (s2.loc.x * s2.loc.x - s1.loc.x * s1.loc.x + s2.loc.y * s2.loc.y -
                            s1.loc.y * s1.loc.y);
    Line l = make_line(dx, dy, c);
    l.tag_first = s1.id;
    l.tag_second = s2.id;
    return l;
}

int PlanarSubdivision::interior_vertex_count() const {
    int n = 0;
    for (const Vertex& v : vertices)
        if (v.origin1 >= 0 && v.origin2 >= 0) ++n;
    return n;
}

PlanarSubdivision build_arrangement(std::vector<Line> lines, BBox bbox, bool expand_bbox) {
    if (static_cast<int>(lines.size()) > kMaxLines)
        throw std::invalid_argument("build_arrangement: refusing more than 2000 lines");
    if (!(bbox.xmin < bbox.xmax) || !(bbox.ymin < bbox.ymax))
        throw std::invalid_argument("build_arrangement: empty bbox");
    for (Line& l : lines) {
        Line n = make_line(l.a, l.b, l.c);
        n.tag_first = l.tag_first;
        n.tag_second = l.tag_second;
        l = n;
    }

    const std::vector<Line> base = lines;
    const double pert_unit = 1e-6 * (1.0 + box_diag(bbox));

    PlanarSubdivision sub;
    std::vector<Crossing> crossings;
    BBox box = bbox;
    double snap = 0.0;
    bool clean = false;
    for (int attempt = 0; attempt < 12 && !clean; ++attempt) {
        if (attempt > 0) {
            sub.perturbed = true;
            for (size_t i = 0; i < lines.size(); ++i)
                lines[i].c = base[i].c + attempt * pert_unit * static_cast<double>(i + 1);
        }
        // pairwise crossings; grow the box around them in expand mode
        crossings.clear();
        box = bbox;
        for (size_t i = 0; i < lines.size(); ++i)
            for (size_t j = i + 1; j < lines.size(); ++j) {
                PlanePoint p;
                if (!intersect(lines[i], lines[j], p)) continue;
                if (expand_bbox) {
                    box.xmin = std::min(box.xmin, p.x);
                    box.xmax = std::max(box.xmax, p.x);
                    box.ymin = std::min(box.ymin, p.y);
                    box.ymax = std::max(box.ymax, p.y);
                }
                crossings.push_back({static_cast<int>(i), static_cast<int>(j), p});
            }
        if (expand_bbox) box = box.expanded(std::max(1.0, 0.05 * box_diag(box)));
        snap = 1e-9 * (1.0 + box_diag(box));
        // keep only crossings inside the box
        std::erase_if(crossings, [&](const Crossing& c) { return !box.contains(c.p); });
        clean = !scan_degenerate(lines, box, crossings, snap);
    }
    if (!clean)
        throw std::runtime_error("build_arrangement: could not resolve degeneracies by "
                                 "perturbation");

    sub.lines = lines;
    sub.bbox = box;

    // ---- vertices ----
    auto add_vertex = [&](PlanePoint p, int o1, int o2) {
        sub.vertices.push_back({p, o1, o2});
        return static_cast<int>(sub.vertices.size()) - 1;
    };
    const int c_bl = add_vertex({box.xmin, box.ymin}, -1, -4);
    const int c_br = add_vertex({box.xmax, box.ymin}, -1, -2);
    const int c_tr = add_vertex({box.xmax, box.ymax}, -2, -3);
    const int c_tl = add_vertex({box.xmin, box.ymax}, -3, -4);

    struct OnLine {
        double t;
        int vid;
    };
    std::vector<std::vector<OnLine>> on_line(lines.size());
    // side code -> (coordinate along side, vid)
    std::map<int, std::vector<std::pair<double, int>>> on_side;
    on_side[-1] = {{box.xmin, c_bl}, {box.xmax, c_br}};
    on_side[-2] = {{box.ymin, c_br}, {box.ymax, c_tr}};
    on_side[-3] = {{box.xmin, c_tl}, {box.xmax, c_tr}};
    on_side[-4] = {{box.ymin, c_bl}, {box.ymax, c_tl}};

    for (size_t i = 0; i < lines.size(); ++i) {
        const Clip c = clip_to_box(lines[i], box);
        if (!c.hit) continue;
        for (const double t : {c.t0, c.t1}) {
            const int side = t == c.t0 ? c.side0 : c.side1;
            const PlanePoint p = line_point(lines[i], t);
            const int vid = add_vertex(p, static_cast<int>(i), side);
            on_line[i].push_back({t, vid});
            on_side[side].emplace_back(side == -1 || side == -3 ? p.x : p.y, vid);
        }
    }
    for (const Crossing& cr : crossings) {
        const int vid = add_vertex(cr.p, cr.i, cr.j);
        on_line[static_cast<size_t>(cr.i)].push_back({line_param(lines[static_cast<size_t>(cr.i)], cr.p), vid});
        on_line[static_cast<size_t>(cr.j)].push_back({line_param(lines[static_cast<size_t>(cr.j)], cr.p), vid});
    }

    // ---- edges ----
    auto add_edge = [&](int u, int v, int line) {
        sub.edges.push_back({u, v, line, -1, -1});
        return static_cast<int>(sub.edges.size()) - 1;
    };
    for (size_t i = 0; i < lines.size(); ++i) {
        std::sort(on_line[i].begin(), on_line[i].end(),
                  [](const OnLine& a, const OnLine& b) { return a.t < b.t; });
        for (size_t j = 0; j + 1 < on_line[i].size(); ++j)
            add_edge(on_line[i][j].vid, on_line[i][j + 1].vid, static_cast<int>(i));
    }
    for (auto& [side, pts] : on_side) {
        std::sort(pts.begin(), pts.end());
        for (size_t j = 0; j + 1 < pts.size(); ++j)
            add_edge(pts[j].second, pts[j + 1].second, side);
    }

    // ---- faces via half-edge tracing ----
    const int ne = static_cast<int>(sub.edges.size());
    // halfedge 2e = (u->v), 2e+1 = (v->u)
    auto he_from = [&](int h) { return h & 1 ? sub.edges[static_cast<size_t>(h >> 1)].v
                                             : sub.edges[static_cast<size_t>(h >> 1)].u; };
    auto he_to = [&](int h) { return h & 1 ? sub.edges[static_cast<size_t>(h >> 1)].u
                                           : sub.edges[static_cast<size_t>(h >> 1)].v; };

    std::vector<std::vector<std::pair<double, int>>> outgoing(sub.vertices.size());
    for (int h = 0; h < 2 * ne; ++h) {
        const PlanePoint a = sub.vertices[static_cast<size_t>(he_from(h))].pos;
        const PlanePoint b = sub.vertices[static_cast<size_t>(he_to(h))].pos;
        outgoing[static_cast<size_t>(he_from(h))].emplace_back(std::atan2(b.y - a.y, b.x - a.x), h);
    }
    for (auto& out : outgoing) std::sort(out.begin(), out.end());

    auto next_he = [&](int h) {
        const int v = he_to(h);
        const auto& out = outgoing[static_cast<size_t>(v)];
        const int rev = h ^ 1;
        int idx = -1;
        for (size_t i = 0; i < out.size(); ++i)
            if (out[i].second == rev) { idx = static_cast<int>(i); break; }
        const int m = static_cast<int>(out.size());
        return out[static_cast<size_t>((idx - 1 + m) % m)].second;
    };

    std::vector<int> he_face(static_cast<size_t>(2 * ne), -2);  // -2 unvisited, -1 outer
    int outer_cycles = 0;
    for (int h0 = 0; h0 < 2 * ne; ++h0) {
        if (he_face[static_cast<size_t>(h0)] != -2) continue;
        std::vector<int> cycle_he;
        int h = h0;
        do {
            cycle_he.push_back(h);
            h = next_he(h);
        } while (h != h0);

        double area2 = 0.0;
        for (int ch : cycle_he) {
            const PlanePoint a = sub.vertices[static_cast<size_t>(he_from(ch))].pos;
            const PlanePoint b = sub.vertices[static_cast<size_t>(he_to(ch))].pos;
            area2 += a.x * b.y - b.x * a.y;
        }
        if (area2 > 0.0) {
            PlanarSubdivision::Face f;
            PlanePoint cen{0.0, 0.0};
            for (int ch : cycle_he) {
                f.cycle.push_back(he_from(ch));
                f.edges.push_back(ch >> 1);
                cen.x += sub.vertices[static_cast<size_t>(he_from(ch))].pos.x;
                cen.y += sub.vertices[static_cast<size_t>(he_from(ch))].pos.y;
            }
            cen.x /= static_cast<double>(f.cycle.size());
            cen.y /= static_cast<double>(f.cycle.size());
            f.rep = cen;
            const int fid = static_cast<int>(sub.faces.size());
            for (int ch : cycle_he) he_face[static_cast<size_t>(ch)] = fid;
            sub.faces.push_back(std::move(f));
        } else {
            ++outer_cycles;
            for (int ch : cycle_he) he_face[static_cast<size_t>(ch)] = -1;
        }
    }
    if (ne > 0 && outer_cycles != 1)
        throw std::runtime_error("build_arrangement: unexpected outer-cycle count " +
                                 std::to_string(outer_cycles));

    for (int e = 0; e < ne; ++e) {
        sub.edges[static_cast<size_t>(e)].face_left = he_face[static_cast<size_t>(2 * e)];
        sub.edges[static_cast<size_t>(e)].face_right = he_face[static_cast<size_t>(2 * e + 1)];
    }
    return sub;
}

namespace {

// strictly-inside test for a convex CCW face; returns +1 inside, 0 near
// boundary (ambiguous), -1 outside
int side_of_face(const PlanarSubdivision& sub, const PlanarSubdivision::Face& f,
                 const PlanePoint& p, double tol) {
    bool near = false;
    const size_t n = f.cycle.size();
    for (size_t i = 0; i < n; ++i) {
        const PlanePoint a = sub.vertices[static_cast<size_t>(f.cycle[i])].pos;
        const PlanePoint b = sub.vertices[static_cast<size_t>(f.cycle[(i + 1) % n])].pos;
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (cross < -tol * len) return -1;
        if (cross <= tol * len) near = true;
    }
    return near ? 0 : +1;
}

}  // namespace

std::optional<int> point_locate(const PlanarSubdivision& sub, const PlanePoint& x) {
    const double tol = 1e-9 * (1.0 + box_diag(sub.bbox));
    for (size_t f = 0; f < sub.faces.size(); ++f) {
        const int s = side_of_face(sub, sub.faces[f], x, tol);
        if (s == 0) return std::nullopt;  // ambiguous: within tol of a boundary
        if (s > 0) return static_cast<int>(f);
    }
    return std::nullopt;
}

BBox default_diagram_bbox(const SiteSet& s) {
    BBox b{s.sites.front().loc.x, s.sites.front().loc.y, s.sites.front().loc.x,
           s.sites.front().loc.y};
    for (const Site& st : s.sites) {
        b.xmin = std::min(b.xmin, st.loc.x);
        b.xmax = std::max(b.xmax, st.loc.x);
        b.ymin = std::min(b.ymin, st.loc.y);
        b.ymax = std::max(b.ymax, st.loc.y);
    }
    return b.expanded(std::max(1.0, 0.25 * box_diag(b)));
}

std::vector<int> nearest_site_ids(const PlanePoint& x, const SiteSet& s, int k) {
    if (k < 1 || k > s.size())
        throw std::invalid_argument("nearest_site_ids: need 1 <= k <= n");
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(s.sites.size());
    for (const Site& st : s.sites) keyed.emplace_back(dist_sq(x, st.loc), st.id);
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> ids;
    ids.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) ids.push_back(keyed[static_cast<size_t>(i)].second);
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

constexpr int kMaxDiagramSites = 60;

std::vector<Line> all_bisectors(const SiteSet& s) {
    std::vector<Line> lines;
    lines.reserve(static_cast<size_t>(s.size()) * static_cast<size_t>(s.size() - 1) / 2);
    for (int i = 0; i < s.size(); ++i)
        for (int j = i + 1; j < s.size(); ++j)
            lines.push_back(bisector(s.sites[static_cast<size_t>(i)], s.sites[static_cast<size_t>(j)]));
    return lines;
}

}  // namespace

CandidateDiagram candidate_diagram(const SiteSet& s) {
    return candidate_diagram(s, default_diagram_bbox(s));
}

CandidateDiagram candidate_diagram(const SiteSet& s, const BBox& bbox) {
    s.validate();
    if (s.size() > kMaxDiagramSites)
        throw std::invalid_argument("candidate_diagram: refusing more than 60 sites");
    CandidateDiagram d;
    d.subdivision = build_arrangement(all_bisectors(s), bbox, /*expand_bbox=*/true);
    d.face_candidates.reserve(d.subdivision.faces.size());
    for (const auto& f : d.subdivision.faces) {
        d.face_candidates.push_back(candidate_set(f.rep, s).member_ids);
        d.space_complexity += static_cast<long long>(d.face_candidates.back().size());
    }
    return d;
}

KthOrderCells kth_order_cells(const SiteSet& s, int k) {
    return kth_order_cells(s, k, default_diagram_bbox(s));
}

KthOrderCells kth_order_cells(const SiteSet& s, int k, const BBox& bbox) {
    s.validate();
    if (s.size() > kMaxDiagramSites)
        throw std::invalid_argument("kth_order_cells: refusing more than 60 sites");
    if (k < 1 || k > s.size())
        throw std::invalid_argument("kth_order_cells: need 1 <= k <= n");

    KthOrderCells cells;
    cells.subdivision = build_arrangement(all_bisectors(s), bbox, /*expand_bbox=*/true);
    const size_t nf = cells.subdivision.faces.size();
    cells.face_labels.reserve(nf);
    for (const auto& f : cells.subdivision.faces)
        cells.face_labels.push_back(nearest_site_ids(f.rep, s, k));

    // union-find over faces sharing an edge with equal labels
    std::vector<int> parent(nf);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    };
    for (const auto& e : cells.subdivision.edges) {
        if (e.face_left < 0 || e.face_right < 0) continue;
        if (cells.face_labels[static_cast<size_t>(e.face_left)] !=
            cells.face_labels[static_cast<size_t>(e.face_right)])
            continue;
        const int a = find(e.face_left), b = find(e.face_right);
        if (a != b) parent[static_cast<size_t>(a)] = b;
    }
    cells.face_component.assign(nf, -1);
    std::map<int, int> compact;
    for (size_t f = 0; f < nf; ++f) {
        const int root = find(static_cast<int>(f));
        const auto it = compact.try_emplace(root, static_cast<int>(compact.size())).first;
        cells.face_component[f] = it->second;
    }
    cells.merged_cell_count = static_cast<int>(compact.size());
    return cells;
}

}  // namespace pplab
