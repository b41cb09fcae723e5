#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kepler/geometry.hpp"

namespace kepler {

/// Periodic structure attached to a patch: three basis vectors (columns of
/// `basis`) and the offset points of the fundamental cell.
struct Lattice {
    Eigen::Matrix3d basis;
    std::vector<Vec3> offsets;
};

/// Finite set of unit-ball centers; pairwise distance >= 2 - tol_geom.
/// `interior` is filled by mark_interior (voronoi module) and is empty
/// until then.
struct PackingPatch {
    std::vector<Vec3> centers;
    std::optional<Lattice> lattice;
    std::vector<char> interior;

    int size() const { return static_cast<int>(centers.size()); }
};

/// Triangle over center indices, anchored at v0: edge a = |v0 v1|,
/// b = |v0 v2|, c = |v1 v2| (the edge opposite the anchor). A distinguished
/// edge of length w marks the triangles entering the M-weighted sum.
struct Triangle {
    int v0 = -1, v1 = -1, v2 = -1;
    double a = 0, b = 0, c = 0;
    bool anchored = false;
    std::optional<std::pair<int, int>> distinguished;
    double w = 0;

    bool has_vertex(int i) const { return i == v0 || i == v1 || i == v2; }
};

/// Validates the minimum-distance invariant; throws std::runtime_error
/// naming the offending pair. When a lattice is present, also checks that
/// every center is an offset translated by integer lattice steps.
void validate_patch(const PackingPatch& p, double tol_geom = 1e-12);

/// Face-centered cubic patch: all lattice points (nearest-neighbor distance
/// exactly 2) within `radius` of the origin, origin included and first.
/// Membership is decided exactly (integer arithmetic against radius^2).
PackingPatch gen_fcc(double radius);

/// Hexagonal close packing, same conventions; radius membership compares
/// floating squared norms.
PackingPatch gen_hcp(double radius);

/// The four-center fundamental domain of the FCC conventional cubic cell,
/// with its lattice attached.
PackingPatch fcc_conventional_cell();

/// Indices j != i with |c_j - c_i| <= cutoff, sorted by (distance, index).
std::vector<int> neighbors(const PackingPatch& p, int i, double cutoff);

/// All triangles with one vertex at center i and every edge length at most
/// max_edge, anchored at i, ordered lexicographically by sorted vertex
/// indices. Requires 2 <= max_edge <= sqrt8().hi().
std::vector<Triangle> anchored_triangles(const PackingPatch& p, int i, double max_edge);

/// Distinguished edge selected by an SRule: endpoints (center indices) and
/// its length.
struct SEdge {
    int e0, e1;
    double w;
};

/// Membership rule for the distinguished-triangle family. The callable sees
/// the triangle only through its sorted vertex ids and the three pairwise
/// lengths (l01, l02, l12 for the sorted ids), so membership and the
/// distinguished edge cannot depend on which vertex anchors the triangle.
struct SRule {
    std::string name;
    double r = 0;
    std::function<std::optional<SEdge>(const std::array<int, 3>&,
                                       const std::array<double, 3>&)> accept;
};

/// Named rule registry. "default": accept iff the strictly unique longest
/// edge has length in (r, sqrt(8) + tol_geom] and the other two edges are
/// <= r; the longest edge is distinguished. "none": empty family.
SRule make_s_rule(const std::string& name, double r, double tol_geom = 1e-12);

/// All rule-accepted triangles containing center i, anchored at i, with the
/// distinguished edge and w set; same deterministic order as
/// anchored_triangles.
std::vector<Triangle> distinguished_triangles(const PackingPatch& p, int i, const SRule& rule);

/// Re-anchor a triangle at one of its vertices (edge labels permute so that
/// c stays opposite the anchor).
Triangle reanchor(const Triangle& t, int vertex);

// Patch document I/O. Format: a JSON object with "radius_unit" =
// "ball_radius", "centers" = array of [x, y, z] decimal triples, and an
// optional "lattice" = {"basis": [3 basis vectors], "offsets": [...]}.
// Round-trips centers exactly; load re-validates all invariants.
PackingPatch load_patch(std::istream& in, double tol_geom = 1e-12);
PackingPatch load_patch_file(const std::string& path, double tol_geom = 1e-12);
void save_patch(const PackingPatch& p, std::ostream& out);

} // namespace kepler
