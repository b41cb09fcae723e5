#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "kepler/packing.hpp"

namespace kepler {

/// Half-space constraint normal . x <= offset in the anchor-centered frame.
struct Halfspace {
    Vec3 normal;
    double offset;
};

/// Voronoi cell of one center, as the intersection of neighbor bisector
/// half-spaces and a bounding box of half-width `cutoff`. Coordinates are
/// relative to the anchor center.
struct VoronoiCell {
    int anchor = -1;
    double cutoff = 0;
    std::vector<Halfspace> halfspaces;        // bisectors actually used
    std::vector<Vec3> vertices;
    std::vector<std::vector<int>> faces;      // vertex cycles, outward-oriented
    std::vector<int> face_planes;             // per face: index into halfspaces, or -1 for a box face
    double max_vertex_dist = 0;
    bool interior_certified = false;          // all vertices within cutoff/2 - margin
    Interval volume{0.0};                     // filled by cell_volume
};

/// Intersect explicit half-spaces with the bounding box; used directly by
/// tests with fixture polytopes and by voronoi_cell internally.
VoronoiCell cell_from_halfspaces(std::vector<Halfspace> planes, double cutoff,
                                 double interior_margin = 0.1, double vertex_tol = 1e-9);

/// Build the Voronoi cell of center i from all bisectors within `cutoff`.
/// Requires cutoff >= 4 so that the interior certificate (vertices within
/// cutoff/2 - margin) is meaningful for close packings.
VoronoiCell voronoi_cell(const PackingPatch& p, int i, double cutoff = 6.0,
                         double interior_margin = 0.1, double vertex_tol = 1e-9);

/// Rigorous volume: faces fanned into tetrahedra from the anchor, vertices
/// inflated to intervals of the given half-width per coordinate. Throws
/// std::domain_error when the cell is not interior-certified.
Interval cell_volume(const VoronoiCell& cell, double inflate_halfwidth = 1e-11);

/// True iff every cell vertex lies strictly within cutoff/2 - 0.1 of the
/// center, certifying that no center outside the cutoff can alter the cell.
bool is_interior(const PackingPatch& p, int i, double cutoff = 6.0);

/// Fill p.interior for every center (one cell construction per center).
void mark_interior(PackingPatch& p, double cutoff = 6.0);

/// Debug dump: anchor, vertices, faces, volume_lo, volume_hi.
nlohmann::ordered_json cell_to_json(const VoronoiCell& cell);

} // namespace kepler
