#pragma once

#include <optional>
#include <vector>

#include "pplab/geometry.hpp"

namespace pplab {

/// Line a*x + b*y = c with (a,b) unit length and the first nonzero of (a,b)
/// positive.  tag_first/tag_second optionally record the generating site pair.
struct Line {
    double a = 0.0, b = 1.0, c = 0.0;
    int tag_first = -1, tag_second = -1;

    /// Signed offset of p from the line (positive on the (a,b) side).
    double side(const PlanePoint& p) const { return a * p.x + b * p.y - c; }
};

/// Normalizes coefficients; throws std::invalid_argument if a and b are ~0.
Line make_line(double a, double b, double c);

/// Perpendicular bisector of the two site locations (equidistance line),
/// tagged with the site ids.  Throws if the locations coincide.
Line bisector(const Site& s1, const Site& s2);

/// Arrangement of lines clipped to a box, stored as explicit vertex / edge /
/// face lists (faces are the bounded cells inside the box; the outside of
/// the box is face id -1).
struct PlanarSubdivision {
    // vertex origin: values >= 0 are input line indices, negative values are
    // box side codes (-1 bottom, -2 right, -3 top, -4 left)
    struct Vertex {
        PlanePoint pos;
        int origin1 = -1, origin2 = -1;
    };
    struct Edge {
        int u = -1, v = -1;
        int line = -1;                       // input line index, or side code
        int face_left = -1, face_right = -1; // face of (u->v) / (v->u)
    };
    struct Face {
        std::vector<int> cycle;  // vertex ids, counterclockwise
        std::vector<int> edges;  // edge ids; edges[i] joins cycle[i] and cycle[i+1]
        PlanePoint rep;          // interior representative point
    };

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<Face> faces;
    std::vector<Line> lines;  // the (possibly perturbed) input lines
    BBox bbox;
    bool perturbed = false;

    struct Complexity {
        long long vertices = 0, edges = 0, faces = 0;
        long long total() const { return vertices + edges + faces; }
    };
    Complexity complexity() const {
        return {static_cast<long long>(vertices.size()), static_cast<long long>(edges.size()),
                static_cast<long long>(faces.size())};
    }

    /// Crossings of two input lines (excludes box corners and boundary hits).
    int interior_vertex_count() const;
};

/// Builds the clipped arrangement.  With expand_bbox the box is grown to
/// contain every pairwise line intersection (plus margin); with it off the
/// box is used exactly as given and outside structure is dropped.  Degenerate
/// inputs -- duplicate lines, near-parallel pairs closer than 1e-12,
/// concurrent triples, crossings hitting the boundary -- are resolved by a
/// deterministic line-index offset perturbation and flagged via `perturbed`.
/// Refuses more than 2000 lines.
PlanarSubdivision build_arrangement(std::vector<Line> lines, BBox bbox, bool expand_bbox = true);

/// Face containing x by linear scan over face polygons.  Returns nullopt if
/// x is within ~1e-9 of an edge (ambiguous; callers perturb and retry) or
/// not strictly inside any bounded face.
std::optional<int> point_locate(const PlanarSubdivision& sub, const PlanePoint& x);

/// The candidate diagram of a site set: the arrangement of all pairwise
/// bisectors with, per face, the candidate set evaluated at the face
/// representative.  space_complexity is the sum of the candidate-set sizes.
/// Refuses more than 60 sites.
struct CandidateDiagram {
    PlanarSubdivision subdivision;
    std::vector<std::vector<int>> face_candidates;
    long long space_complexity = 0;
};

CandidateDiagram candidate_diagram(const SiteSet& s);
CandidateDiagram candidate_diagram(const SiteSet& s, const BBox& bbox);

/// Faces of the bisector arrangement labelled with the k nearest site ids of
/// their representative; merging adjacent faces with equal labels yields the
/// k-th order Voronoi diagram.  face_component maps each face to its merged
/// cell (0..merged_cell_count-1).
struct KthOrderCells {
    PlanarSubdivision subdivision;
    std::vector<std::vector<int>> face_labels;
    std::vector<int> face_component;
    int merged_cell_count = 0;
};

KthOrderCells kth_order_cells(const SiteSet& s, int k);
KthOrderCells kth_order_cells(const SiteSet& s, int k, const BBox& bbox);

/// k nearest site ids of x (by distance, ties by id), sorted by id.
std::vector<int> nearest_site_ids(const PlanePoint& x, const SiteSet& s, int k);

/// Default diagram box: the sites' bounding box padded by max(1, quarter of
/// its diagonal).
BBox default_diagram_bbox(const SiteSet& s);

}  // namespace pplab
