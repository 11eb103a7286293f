#include "pplab/staircase.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pplab {

namespace {

// value-with-id comparison behind the simulated general position: an exact
// value tie counts the smaller id as strictly smaller.
inline bool leq_tiebreak(double a, int ida, double b, int idb) {
    return a < b || (a == b && ida < idb);
}

void check_cloud(const PointCloud& cloud) {
    if (cloud.points.empty()) throw std::invalid_argument("staircase: empty point cloud");
    if (cloud.dim < 1) throw std::invalid_argument("staircase: dim must be >= 1");
    for (const CloudPoint& c : cloud.points)
        if (c.p.dim() != cloud.dim)
            throw std::invalid_argument("staircase: point " + std::to_string(c.id) +
                                        " has dimension " + std::to_string(c.p.dim()) +
                                        ", expected " + std::to_string(cloud.dim));
}

// d = 2 fast path: scan in (x, id) order keeping a running minimum of (y, id).
std::vector<int> staircase_2d(const PointCloud& cloud) {
    std::vector<int> idx(cloud.points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const CloudPoint& ca = cloud.points[static_cast<size_t>(a)];
        const CloudPoint& cb = cloud.points[static_cast<size_t>(b)];
        if (ca.p[0] != cb.p[0]) return ca.p[0] < cb.p[0];
        return ca.id < cb.id;
    });

    std::vector<int> out;
    double best_y = 0.0;
    int best_id = -1;
    bool first = true;
    for (int i : idx) {
        const CloudPoint& c = cloud.points[static_cast<size_t>(i)];
        if (first || leq_tiebreak(c.p[1], c.id, best_y, best_id)) {
            out.push_back(c.id);
            best_y = c.p[1];
            best_id = c.id;
            first = false;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

bool beats(const CloudPoint& a, const CloudPoint& b) {
    const int d = a.p.dim();
    for (int i = 0; i < d; ++i)
        if (!leq_tiebreak(a.p[i], a.id, b.p[i], b.id)) return false;
    return true;
}

bool StaircaseFrontier::insert(const CloudPoint& c) {
    for (const CloudPoint& m : members_)
        if (beats(m, c)) return false;
    std::erase_if(members_, [&](const CloudPoint& m) { return beats(c, m); });
    members_.push_back(c);
    return true;
}

std::vector<int> staircase(const PointCloud& cloud) {
    check_cloud(cloud);
    if (cloud.dim == 2) return staircase_2d(cloud);

    // Any beater of a point has strictly smaller coordinate sum (or an all-tie
    // with smaller id), so scanning in (sum, id) order means frontier members
    // are never evicted and the final frontier is the staircase.
    std::vector<int> idx(cloud.points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> sums(cloud.points.size());
    for (size_t i = 0; i < cloud.points.size(); ++i) {
        double s = 0.0;
        for (double v : cloud.points[i].p.coords) s += v;
        sums[i] = s;
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (sums[static_cast<size_t>(a)] != sums[static_cast<size_t>(b)])
            return sums[static_cast<size_t>(a)] < sums[static_cast<size_t>(b)];
        return cloud.points[static_cast<size_t>(a)].id < cloud.points[static_cast<size_t>(b)].id;
    });

    StaircaseFrontier frontier(cloud.dim);
    std::vector<int> out;
    for (int i : idx)
        if (frontier.insert(cloud.points[static_cast<size_t>(i)]))
            out.push_back(cloud.points[static_cast<size_t>(i)].id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> prefix_staircase_union(const PointCloud& cloud) {
    check_cloud(cloud);
    StaircaseFrontier frontier(cloud.dim);
    std::vector<int> out;
    for (const CloudPoint& c : cloud.points)
        if (frontier.insert(c)) out.push_back(c.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> orthogonal_hull_points(const PointCloud& cloud) {
    check_cloud(cloud);
    if (cloud.dim > 20)
        throw std::invalid_argument("orthogonal_hull_points: refusing dim > 20 (2^d corners)");

    std::vector<int> out;
    PointCloud flipped = cloud;
    const uint32_t corners = 1u << cloud.dim;
    for (uint32_t mask = 0; mask < corners; ++mask) {
        for (size_t i = 0; i < cloud.points.size(); ++i)
            for (int j = 0; j < cloud.dim; ++j) {
                const double t = cloud.points[i].p[j];
                flipped.points[i].p[j] = (mask >> j) & 1u ? 1.0 - t : t;
            }
        std::vector<int> st = staircase(flipped);
        out.insert(out.end(), st.begin(), st.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace pplab
