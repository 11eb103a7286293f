#include "pplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pplab {

bool dominates(const AttrPoint& p, const AttrPoint& q) {
    if (p.dim() != q.dim())
        throw std::invalid_argument("dominates: dimension mismatch (" +
                                    std::to_string(p.dim()) + " vs " + std::to_string(q.dim()) + ")");
    for (int i = 0; i < p.dim(); ++i)
        if (p[i] > q[i]) return false;
    return true;
}

double point_volume(const AttrPoint& p) {
    double v = 1.0;
    for (double c : p.coords) v *= c;
    return v;
}

void SiteSet::validate() const {
    if (dim < 1) throw std::invalid_argument("SiteSet: dim must be >= 1");
    const int n = size();
    for (const Site& s : sites) {
        if (s.id < 0) throw std::invalid_argument("SiteSet: negative site id " + std::to_string(s.id));
        if (s.attrs.dim() != dim)
            throw std::invalid_argument("SiteSet: site " + std::to_string(s.id) + " has " +
                                        std::to_string(s.attrs.dim()) + " attributes, expected " +
                                        std::to_string(dim));
        for (double c : s.attrs.coords)
            if (!(c >= 0.0 && c <= 1.0))
                throw std::invalid_argument("SiteSet: site " + std::to_string(s.id) +
                                            " has attribute outside [0,1]");
        if (!std::isfinite(s.loc.x) || !std::isfinite(s.loc.y))
            throw std::invalid_argument("SiteSet: site " + std::to_string(s.id) +
                                        " has non-finite location");
    }

    std::vector<int> ids;
    ids.reserve(static_cast<size_t>(n));
    for (const Site& s : sites) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("SiteSet: duplicate site id");

    std::vector<std::pair<double, double>> locs;
    locs.reserve(static_cast<size_t>(n));
    for (const Site& s : sites) locs.emplace_back(s.loc.x, s.loc.y);
    std::sort(locs.begin(), locs.end());
    if (std::adjacent_find(locs.begin(), locs.end()) != locs.end())
        throw std::invalid_argument("SiteSet: duplicate site location");

    std::vector<double> col(static_cast<size_t>(n));
    for (int c = 0; c < dim; ++c) {
        for (int i = 0; i < n; ++i) col[static_cast<size_t>(i)] = sites[static_cast<size_t>(i)].attrs[c];
        std::sort(col.begin(), col.end());
        if (std::adjacent_find(col.begin(), col.end()) != col.end())
            throw std::invalid_argument("SiteSet: duplicate attribute value in coordinate " +
                                        std::to_string(c));
    }
}

int SiteSet::index_of(int id) const {
    for (int i = 0; i < size(); ++i)
        if (sites[static_cast<size_t>(i)].id == id) return i;
    throw std::invalid_argument("SiteSet: no site with id " + std::to_string(id));
}

double dist_sq(const PlanePoint& a, const PlanePoint& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double dist(const PlanePoint& a, const PlanePoint& b) { return std::sqrt(dist_sq(a, b)); }

double dist(const PlanePoint& x, const Site& s) { return dist(x, s.loc); }

std::vector<int> volume_ordering(const SiteSet& s) {
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(s.sites.size());
    for (const Site& site : s.sites) keyed.emplace_back(point_volume(site.attrs), site.id);
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order;
    order.reserve(keyed.size());
    for (const auto& [vol, id] : keyed) order.push_back(id);
    return order;
}

LiftedPlane lift(const Site& s) {
    const double p = s.loc.x, q = s.loc.y;
    return LiftedPlane{-2.0 * p, -2.0 * q, p * p + q * q, s.id};
}

}  // namespace pplab
