#pragma once

#include <vector>

#include "pplab/geometry.hpp"

namespace pplab {

/// A labelled point of a d-dimensional cloud.
struct CloudPoint {
    int id = 0;
    AttrPoint p;
};

/// A finite cloud of labelled points, all of dimension dim.
struct PointCloud {
    int dim = 0;
    std::vector<CloudPoint> points;

    int size() const { return static_cast<int>(points.size()); }
};

/// Strict "beats" predicate used by all staircase computations: a beats b if
/// a is coordinatewise no worse than b, where an exact tie in a coordinate is
/// broken in favour of the smaller id (simulated general position).  For
/// clouds with pairwise-distinct coordinate values this is ordinary strict
/// domination.
bool beats(const CloudPoint& a, const CloudPoint& b);

/// Incrementally maintained staircase (minima under `beats`) of an insertion
/// sequence.  insert() returns true iff the new point is not beaten by the
/// current members, i.e. iff it belongs to the staircase of the prefix seen
/// so far; members it beats are evicted so that members() is always exactly
/// the staircase of the inserted prefix.
class StaircaseFrontier {
public:
    explicit StaircaseFrontier(int dim) : dim_(dim) {}

    bool insert(const CloudPoint& c);
    const std::vector<CloudPoint>& members() const { return members_; }
    int size() const { return static_cast<int>(members_.size()); }

private:
    int dim_;
    std::vector<CloudPoint> members_;
};

/// Ids of the staircase (Pareto-minimal) points of the cloud, ascending.
/// d = 2 runs the sort + running-minimum scan in O(n log n); other
/// dimensions process points in increasing coordinate-sum order against the
/// frontier built so far (worst case O(n^2 d), far less on typical inputs).
/// Throws std::invalid_argument on an empty cloud or inconsistent dims.
std::vector<int> staircase(const PointCloud& cloud);

/// Ids of the union of the staircases of all prefixes of the cloud, in the
/// given order: exactly the points not beaten by any earlier point.
std::vector<int> prefix_staircase_union(const PointCloud& cloud);

/// Ids of points on the orthogonal convex hull: the union over the 2^d
/// corners of the corner staircases, where corner mask bit j flips
/// coordinate j via t -> 1-t.  Refuses d > 20.
std::vector<int> orthogonal_hull_points(const PointCloud& cloud);

}  // namespace pplab
