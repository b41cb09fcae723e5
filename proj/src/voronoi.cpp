#include "kepler/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kepler {

namespace {

struct Plane {
    Vec3 n;
    double d;
    int source; // index into cell.halfspaces, or -1 for box planes
};

// Solve n0.v = d0, n1.v = d1, n2.v = d2 by Cramer's rule. Returns false for
// (near-)parallel triples.
bool solve_triple(const Plane& p0, const Plane& p1, const Plane& p2, Vec3& v) {
    const Vec3 c12 = p1.n.cross(p2.n);
    const double det = p0.n.dot(c12);
    if (std::fabs(det) < 1e-10) return false;
    const Vec3 c20 = p2.n.cross(p0.n);
    const Vec3 c01 = p0.n.cross(p1.n);
    v = (p0.d * c12 + p1.d * c20 + p2.d * c01) / det;
    return v.allFinite();
}

struct BuiltCell {
    std::vector<Vec3> vertices;
    double rho = 0;
};

// Vertex enumeration over the given planes: every feasible triple
// intersection, merged at vertex_tol. Planes must be pre-sorted; feasibility
// is checked nearest-plane-first so infeasible candidates exit early.
BuiltCell enumerate_vertices(const std::vector<Plane>& planes, double vertex_tol) {
    const int m = static_cast<int>(planes.size());
    std::vector<Vec3> cand;
    Vec3 v;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = b + 1; c < m; ++c) {
                if (!solve_triple(planes[a], planes[b], planes[c], v)) continue;
                bool ok = true;
                for (int k = 0; k < m; ++k) {
                    if (planes[k].n.dot(v) > planes[k].d + vertex_tol) {
                        ok = false;
                        break;
                    }
                }
                if (ok) cand.push_back(v);
            }
    std::sort(cand.begin(), cand.end(), [](const Vec3& x, const Vec3& y) {
        return std::tie(x.x(), x.y(), x.z()) < std::tie(y.x(), y.y(), y.z());
    });
    BuiltCell out;
    for (const Vec3& c : cand) {
        bool merged = false;
        for (const Vec3& w : out.vertices) {
            if ((c - w).norm() <= vertex_tol) {
                merged = true;
                break;
            }
        }
        if (!merged) out.vertices.push_back(c);
    }
    for (const Vec3& w : out.vertices) out.rho = std::max(out.rho, w.norm());
    return out;
}

void build_faces(VoronoiCell& cell, const std::vector<Plane>& planes, double vertex_tol) {
    const double face_tol = 2.0 * vertex_tol;
    for (const Plane& pl : planes) {
        std::vector<int> on;
        for (int i = 0; i < static_cast<int>(cell.vertices.size()); ++i)
            if (pl.n.dot(cell.vertices[i]) >= pl.d - face_tol) on.push_back(i);
        if (on.size() < 3) continue;

        // Angular order around the face centroid in a tangent basis.
        Vec3 centroid = Vec3::Zero();
        for (int i : on) centroid += cell.vertices[i];
        centroid /= double(on.size());
        Vec3 t1 = pl.n.unitOrthogonal();
        Vec3 t2 = pl.n.cross(t1);
        std::sort(on.begin(), on.end(), [&](int i, int j) {
            const Vec3 u = cell.vertices[i] - centroid;
            const Vec3 w = cell.vertices[j] - centroid;
            double ai = std::atan2(u.dot(t2), u.dot(t1));
            double aj = std::atan2(w.dot(t2), w.dot(t1));
            return std::tie(ai, i) < std::tie(aj, j);
        });

        // Orient counterclockwise as seen from outside (Newell normal along
        // the outward plane normal), then start the cycle at the smallest
        // vertex index so output is canonical.
        Vec3 newell = Vec3::Zero();
        for (std::size_t k = 0; k < on.size(); ++k) {
            const Vec3& u = cell.vertices[on[k]];
            const Vec3& w = cell.vertices[on[(k + 1) % on.size()]];
            newell += u.cross(w);
        }
        if (newell.dot(pl.n) < 0) std::reverse(on.begin(), on.end());
        auto lowest = std::min_element(on.begin(), on.end());
        std::rotate(on.begin(), lowest, on.end());

        cell.faces.push_back(on);
        cell.face_planes.push_back(pl.source);
    }
}

} // namespace

VoronoiCell cell_from_halfspaces(std::vector<Halfspace> user_planes, double cutoff,
                                 double interior_margin, double vertex_tol) {
    VoronoiCell cell;
    cell.cutoff = cutoff;
    cell.halfspaces = std::move(user_planes);

    // Deterministic processing order: sorted by (offset, index); degenerate
    // ties resolve by this order and by the vertex merge below.
    std::vector<int> order(cell.halfspaces.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::tie(cell.halfspaces[i].offset, i) <
               std::tie(cell.halfspaces[j].offset, j);
    });

    std::vector<Plane> box;
    for (int axis = 0; axis < 3; ++axis)
        for (double sgn : {1.0, -1.0}) {
            Vec3 n = Vec3::Zero();
            n[axis] = sgn;
            box.push_back({n, cutoff, -1});
        }

    // Grow the active plane set until every excluded plane is provably
    // redundant: a half-space at offset d cannot cut a cell contained in the
    // ball of radius rho when d > rho.
    std::size_t active = std::min<std::size_t>(order.size(), 24);
    BuiltCell built;
    std::vector<Plane> planes;
    while (true) {
        planes.clear();
        for (std::size_t k = 0; k < active; ++k) {
            const Halfspace& h = cell.halfspaces[order[k]];
            planes.push_back({h.normal, h.offset, order[k]});
        }
        planes.insert(planes.end(), box.begin(), box.end());
        built = enumerate_vertices(planes, vertex_tol);
        std::size_t next = active;
        while (next < order.size() &&
               cell.halfspaces[order[next]].offset <= built.rho + vertex_tol)
            ++next;
        if (next == active) break;
        active = next;
    }

    cell.vertices = built.vertices;
    cell.max_vertex_dist = built.rho;
    cell.interior_certified = !cell.vertices.empty() &&
                              built.rho < cutoff / 2.0 - interior_margin;
    build_faces(cell, planes, vertex_tol);
    return cell;
}

VoronoiCell voronoi_cell(const PackingPatch& p, int i, double cutoff,
                         double interior_margin, double vertex_tol) {
    if (i < 0 || i >= p.size()) throw std::out_of_range("center index out of range");
    if (!(cutoff >= 4.0)) throw std::domain_error("voronoi cutoff must be >= 4");
    std::vector<Halfspace> planes;
    for (int j : neighbors(p, i, cutoff)) {
        Vec3 u = p.centers[j] - p.centers[i];
        double d = u.norm();
        planes.push_back({u / d, d / 2.0});
    }
    VoronoiCell cell = cell_from_halfspaces(std::move(planes), cutoff,
                                            interior_margin, vertex_tol);
    cell.anchor = i;
    return cell;
}

Interval cell_volume(const VoronoiCell& cell, double inflate_halfwidth) {
    if (!cell.interior_certified)
        throw std::domain_error("cell_volume requires an interior-certified cell");
    // Divergence-theorem fan: with outward-oriented faces and the anchor
    // (origin of the cell frame) inside, the sum of signed tetrahedron
    // volumes over the triangulated surface is the cell volume. The anchor
    // is exact; only vertices carry the inflation interval.
    const IVec3 apex = exact(Vec3::Zero());
    std::vector<IVec3> iv;
    iv.reserve(cell.vertices.size());
    for (const Vec3& v : cell.vertices) iv.push_back(inflate(v, inflate_halfwidth));
    Interval total(0.0);
    for (const auto& face : cell.faces) {
        const IVec3& w0 = iv[face[0]];
        for (std::size_t k = 1; k + 1 < face.size(); ++k)
            total += signed_tetra_volume(apex, w0, iv[face[k]], iv[face[k + 1]]);
    }
    return total;
}

bool is_interior(const PackingPatch& p, int i, double cutoff) {
    return voronoi_cell(p, i, cutoff).interior_certified;
}

void mark_interior(PackingPatch& p, double cutoff) {
    p.interior.assign(p.centers.size(), 0);
    for (int i = 0; i < p.size(); ++i)
        p.interior[i] = is_interior(p, i, cutoff) ? 1 : 0;
}

nlohmann::ordered_json cell_to_json(const VoronoiCell& cell) {
    nlohmann::ordered_json j;
    j["anchor"] = cell.anchor;
    j["vertices"] = nlohmann::ordered_json::array();
    for (const Vec3& v : cell.vertices)
        j["vertices"].push_back({v.x(), v.y(), v.z()});
    j["faces"] = cell.faces;
    j["volume_lo"] = format_double(cell.volume.lo());
    j["volume_hi"] = format_double(cell.volume.hi());
    return j;
}

} // namespace kepler
