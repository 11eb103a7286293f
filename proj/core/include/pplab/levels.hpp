#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pplab/geometry.hpp"
#include "pplab/random_model.hpp"

namespace pplab {

/// Non-vertical line y = slope * x + offset.  All level machinery below works
/// on such lines; the samplers never produce vertical lines.
struct LevelLine {
    double slope = 0.0;
    double offset = 0.0;

    double y_at(double x) const { return slope * x + offset; }
};

/// Result of counting lines strictly below a query point.  If the query lies
/// on (or numerically indistinguishable from) some line, the point is nudged
/// upward by a deterministic amount until it clears every line and the
/// `perturbed` flag is set; lines it was sitting on then count as below.
struct PointLevel {
    int level = 0;
    bool perturbed = false;
};

PointLevel point_level_lines(std::span<const LevelLine> lines, PlanePoint p);

/// One maximal edge of the k-level: an interval on a supporting line every
/// interior point of which has exactly `level` lines strictly below it.
/// Endpoints are crossings with other lines; unbounded ends are flagged rays.
struct LineLevelEdge {
    int line = -1;           // index of the supporting line in the input span
    double x_lo = 0.0;       // left endpoint x; meaningful only when !ray_lo
    double x_hi = 0.0;       // right endpoint x; meaningful only when !ray_hi
    bool ray_lo = false;     // extends to x -> -infinity
    bool ray_hi = false;     // extends to x -> +infinity
    int partner_lo = -1;     // crossing line index at the left endpoint
    int partner_hi = -1;     // crossing line index at the right endpoint
    int level = 0;
};

/// All k-level edges of the arrangement of `lines`: on every line, the
/// maximal intervals whose interior has exactly k lines strictly below.
/// Brute force (per-line crossing sweep with direct midpoint level counts);
/// fine for the few dozen lines the experiments use.
std::vector<LineLevelEdge> k_level_edges_lines(std::span<const LevelLine> lines, int k);

/// Number of k-level edges supported by lines[line].  Always <= k + 2.
int edges_on_line_at_level(std::span<const LevelLine> lines, int line, int k);

/// Inserts the lines in the given order (a permutation of 0..n-1) and after
/// each insertion collects the vertex set of the current k-level; returns the
/// size of the union over all steps.  Vertices are identified by the
/// unordered pair of original line indices that define them, so a vertex seen
/// at two different steps counts once.  Contract: result <= 2*(k+2)*n.
int incremental_k_level_vertices(std::span<const LevelLine> lines, std::span<const int> order,
                                 int k);

/// A vertex of a 3D arrangement of non-vertical planes z = a*x + b*y + c,
/// defined by a triple of planes.  `level` counts the planes strictly below
/// the vertex (the defining triple passes through it and is excluded).
/// `below_ids` is filled only by below_conflict_sizes: the source ids of the
/// sample-external planes strictly below the vertex.
struct PlaneArrangementVertex {
    std::array<int, 3> planes{};  // defining triple, ascending source ids
    double x = 0.0, y = 0.0, z = 0.0;
    int level = 0;
    std::vector<int> below_ids;
};

/// All C(n,3) triple-intersection vertices of the planes, with exact level
/// counts by direct evaluation.  Near-parallel triples (no unique
/// intersection) produce no vertex.  Requires distinct source ids and at most
/// 80 planes (the O(n^4) brute force guard); throws std::invalid_argument
/// otherwise.
std::vector<PlaneArrangementVertex> enumerate_plane_vertices(std::span<const LiftedPlane> planes);

/// One edge of the sample arrangement at level <= k, with its below-conflict
/// count.  Unbounded edges are clipped to a box containing every sample
/// vertex plus margin 1.0; clipped endpoints are flagged.  b_size counts the
/// external planes strictly below at least one endpoint — for linear-height
/// planes over a closed segment that is exactly the set below some point of
/// the edge.
struct ConflictEdge {
    std::array<int, 2> planes{};       // defining pair, ascending source ids
    std::array<double, 3> a{}, b{};    // endpoints in 3-space
    bool clipped_a = false, clipped_b = false;
    int level = 0;                     // sample planes strictly below the interior
    int b_size = 0;                    // |B(a) union B(b)| over external planes
};

struct BelowConflict {
    std::vector<PlaneArrangementVertex> vertices;  // sample vertices at level <= k
    std::vector<ConflictEdge> edges;               // sample edges at level <= k

    long long vertex_b_sum() const;
    long long edge_b_sum() const;
};

/// Below-conflict sizes for a sample of the planes: enumerates the vertices
/// and edges of the sample's arrangement with level (within the sample) at
/// most k, and for each records the external planes strictly below it.
/// `sample` holds distinct indices into `all`.  Levels exclude the defining
/// planes; conflict lists exclude every sample member.
BelowConflict below_conflict_sizes(std::span<const LiftedPlane> all, std::span<const int> sample,
                                   int k);

/// One Clarkson–Shor moment trial series: per trial, sample n sites, lift
/// them to planes, draw r of the planes without replacement, and sum the
/// below-conflict sizes over the sample's level-<= k vertices and edges.
struct MomentReport {
    int n = 0, r = 0, k = 0, trials = 0;
    double vertex_mean = 0.0, vertex_stderr = 0.0;
    double edge_mean = 0.0, edge_stderr = 0.0;

    struct Row {
        int trial = 0;
        long long vertex_sum = 0;
        long long edge_sum = 0;
    };
    std::vector<Row> rows;
};

MomentReport moment_experiment(int n, int r, int k, int trials, uint64_t seed);

/// m random non-vertical lines: slope = tan(angle) with angle uniform in
/// (-1.25, 1.25) radians, offset uniform in [-1, 1).  Slopes are distinct
/// with probability 1, so crossings are in general position.
std::vector<LevelLine> sample_level_lines(int m, SplitMix64& rng);

}  // namespace pplab
