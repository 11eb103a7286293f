#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pplab {

/// Point in the plane (site locations, queries).
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned bounding box.
struct BBox {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(const PlanePoint& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    BBox expanded(double margin) const {
        return {xmin - margin, ymin - margin, xmax + margin, ymax + margin};
    }
};

/// Attribute vector; every coordinate is a desirability value in [0,1],
/// smaller meaning better.
struct AttrPoint {
    std::vector<double> coords;

    int dim() const { return static_cast<int>(coords.size()); }
    double& operator[](int i) { return coords[static_cast<size_t>(i)]; }
    double operator[](int i) const { return coords[static_cast<size_t>(i)]; }
};

/// True if p is coordinatewise <= q (ties allowed, so dominates(p, p) holds).
/// Throws std::invalid_argument on dimension mismatch.
bool dominates(const AttrPoint& p, const AttrPoint& q);

/// Product of the coordinates.
double point_volume(const AttrPoint& p);

/// A site: plane location plus attribute vector.
struct Site {
    int id = 0;
    PlanePoint loc;
    AttrPoint attrs;
};

/// A finite set of sites sharing one attribute dimension.
///
/// Invariants (checked by validate / the JSON loader): ids unique and
/// non-negative, locations pairwise distinct, every attribute vector has
/// length dim with entries in [0,1], and for each coordinate the attribute
/// values are pairwise distinct across sites (general position).
struct SiteSet {
    int dim = 0;
    std::vector<Site> sites;

    int size() const { return static_cast<int>(sites.size()); }

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    /// Index of the site with the given id; throws if absent.
    int index_of(int id) const;
};

double dist_sq(const PlanePoint& a, const PlanePoint& b);
double dist(const PlanePoint& a, const PlanePoint& b);
double dist(const PlanePoint& x, const Site& s);

/// Site ids sorted by increasing point_volume of their attributes, ties
/// broken by ascending id.  If the attributes of site i dominate those of
/// site j (and differ somewhere) then i precedes j.
std::vector<int> volume_ordering(const SiteSet& s);

/// Non-vertical plane z = a*x + b*y + c.  lift(s) is the tangent plane to
/// the downward paraboloid z = -(x^2+y^2) at the vertical projection of
/// s.loc, so that height_at(w) == dist_sq(w, s.loc) - (w.x^2 + w.y^2):
/// comparing plane heights at w compares distances to the sites.
struct LiftedPlane {
    double a = 0.0, b = 0.0, c = 0.0;
    int source_id = -1;

    double height_at(const PlanePoint& w) const { return a * w.x + b * w.y + c; }
};

LiftedPlane lift(const Site& s);

}  // namespace pplab
