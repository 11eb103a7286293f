#pragma once

#include <span>
#include <vector>

#include "pplab/geometry.hpp"

namespace pplab {

/// Candidate set of a query point: sites whose attribute vector extended by
/// the distance to the query is a staircase point of the lifted cloud.  A
/// site is excluded exactly when some other site is at least as close and at
/// least as good in every attribute (with id tie-breaking on exact ties).
struct CandidateSet {
    PlanePoint query;
    std::vector<int> member_ids;       // ascending
    bool distance_tie = false;         // two sites exactly equidistant from query
};

CandidateSet candidate_set(const PlanePoint& x, const SiteSet& s);

/// Proxy set: union over the volume-ordering prefixes S_1 c S_2 c ... of the
/// k nearest sites of each prefix.  Equivalently (and how it is computed): a
/// site joins the proxy iff it is among the k nearest of its own prefix,
/// since a site evicted from the k nearest can never re-enter.
struct ProxySet {
    PlanePoint query;
    int k = 0;
    std::vector<int> member_ids;  // ascending
};

ProxySet proxy_set(const PlanePoint& x, const SiteSet& s, int k);
ProxySet proxy_set(const PlanePoint& x, const SiteSet& s, int k,
                   std::span<const int> volume_order);

/// Candidate-set members missing from the proxy set, per query.
std::vector<std::pair<PlanePoint, int>> containment_violations(
    const SiteSet& s, int k, std::span<const PlanePoint> queries);

/// True iff the site is among the k nearest sites of x (at most k-1 sites
/// strictly closer, ties by id).
bool env_membership(const PlanePoint& x, int site_id, const SiteSet& s, int k);

/// Boundary polygon of the k-environment of a site clipped to the box: the
/// region where the site is among the k nearest.  Star-shaped around the
/// site.  For k >= n the whole box qualifies and is_bbox is set.
struct StarPolygon {
    int center_id = -1;
    PlanePoint center;
    std::vector<PlanePoint> vertices;  // counterclockwise, closed implicitly
    bool is_bbox = false;
};

StarPolygon k_environment_polygon(int site_id, const SiteSet& s, int k, const BBox& bbox);

/// Checks the star-shapedness witness directly: along `rays` directions from
/// the site, the count of strictly closer sites is non-decreasing in the ray
/// parameter (evaluated exactly between consecutive bisector crossings).
bool closer_count_monotone_along_rays(int site_id, const SiteSet& s, const BBox& bbox, int rays);

/// Point-in-polygon (ray crossing) for a simple closed polygon.
bool polygon_contains(const StarPolygon& poly, const PlanePoint& p);

/// Overlay of the k-environment polygons of all volume-ordering prefixes:
/// planar-graph counts of the union of their boundary segments.  V counts
/// distinct segment endpoints plus pairwise crossings, E the induced
/// subsegments, and F comes from Euler's relation applied per connected
/// component (F = 2C + E - V, counting one unbounded face per component).
struct OverlayComplexity {
    long long vertices = 0, edges = 0, faces = 0;
    int components = 0;
    long long total() const { return vertices + edges + faces; }
};

OverlayComplexity proxy_overlay_complexity(const SiteSet& s, int k, const BBox& bbox);

/// k = ceil(c1 * ln^d n), the proxy parameter used by the experiments.
int proxy_k(int n, int d, double c1 = 2.0);

}  // namespace pplab
