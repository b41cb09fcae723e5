#include "kepler/score.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>

namespace kepler {

void validate_params(const ScoreParams& params) {
    if (!std::isfinite(params.poly.q2) || !std::isfinite(params.poly.q1) ||
        !std::isfinite(params.poly.q0))
        throw std::domain_error("polynomial coefficients must be finite");
    if (!(params.edge_cutoff >= 2.0) || params.edge_cutoff > sqrt8().hi())
        throw std::domain_error("edge cutoff must lie in [2, sqrt(8)]");
    if (!std::isfinite(params.edge_weight))
        throw std::domain_error("edge weight must be finite");
}

ScoreParams default_score_params() {
    ScoreParams p;
    p.poly = QuadPoly{0.0, -1.0, sqrt8().mid()};
    p.edge_weight = 1.0;
    p.edge_cutoff = 2.51;
    p.s_rule = "default";
    return p;
}

Interval rhombic_dodecahedron_volume() {
    return Interval(2.0) * sqrt8();
}

void self_check_reference_volume() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        PackingPatch p = gen_fcc(4.2);
        VoronoiCell cell = voronoi_cell(p, 0, 4.2);
        if (!cell.interior_certified)
            throw internal_error("reference FCC cell failed the interior certificate");
        Interval vol = cell_volume(cell);
        if (!intersects(vol, rhombic_dodecahedron_volume()))
            throw internal_error("FCC cell volume disagrees with the reference value");
    });
}

Interval triangle_imbalance(const QuadPoly& poly, const Triangle& t) {
    if (!t.anchored) throw std::domain_error("triangle is not anchored");
    return Interval(2.0) * poly(Interval(t.c)) - poly(Interval(t.a)) - poly(Interval(t.b));
}

int edge_multiplicity(const Triangle& t, int center) {
    if (!t.has_vertex(center)) throw std::domain_error("center is not a triangle vertex");
    if (!t.distinguished) throw std::domain_error("triangle has no distinguished edge");
    return (center == t.distinguished->first || center == t.distinguished->second) ? -1 : 2;
}

Interval anchor_cancellation_residual(const QuadPoly& poly, const Triangle& t) {
    Interval r(0.0);
    for (int v : {t.v0, t.v1, t.v2})
        r += triangle_imbalance(poly, reanchor(t, v));
    return r;
}

CorrectionTerms correction_terms(const PackingPatch& p, int i, const ScoreParams& params) {
    validate_params(params);
    CorrectionTerms out;
    for (const Triangle& t : anchored_triangles(p, i, params.edge_cutoff))
        out.triangle_term += triangle_imbalance(params.poly, t);
    const SRule rule = make_s_rule(params.s_rule, params.edge_cutoff);
    Interval edge_sum(0.0);
    const Interval root8 = sqrt8();
    for (const Triangle& t : distinguished_triangles(p, i, rule))
        edge_sum += Interval(double(edge_multiplicity(t, i))) * (root8 - Interval(t.w));
    out.edge_term = Interval(params.edge_weight) * edge_sum;
    return out;
}

ScoreReport score_center(const PackingPatch& p, int i, const ScoreParams& params,
                         double cutoff, double inflate_halfwidth) {
    VoronoiCell cell = voronoi_cell(p, i, cutoff);
    if (!cell.interior_certified)
        throw std::domain_error("center " + std::to_string(i) +
                                " is not interior at cutoff " + format_double(cutoff));
    ScoreReport r;
    r.center = i;
    r.cell_volume = cell_volume(cell, inflate_halfwidth);
    CorrectionTerms corr = correction_terms(p, i, params);
    r.triangle_term = corr.triangle_term;
    r.edge_term = corr.edge_term;
    r.correction = corr.total();
    r.score = r.cell_volume + r.correction;
    r.margin = r.score - rhombic_dodecahedron_volume();
    return r;
}

PatchScore score_patch(const PackingPatch& p, const ScoreParams& params,
                       double cutoff, double inflate_halfwidth) {
    validate_params(params);
    PatchScore out;
    for (int i = 0; i < p.size(); ++i) {
        VoronoiCell cell = voronoi_cell(p, i, cutoff);
        if (!cell.interior_certified) {
            out.non_interior.push_back(i);
            continue;
        }
        ScoreReport r;
        r.center = i;
        r.cell_volume = cell_volume(cell, inflate_halfwidth);
        CorrectionTerms corr = correction_terms(p, i, params);
        r.triangle_term = corr.triangle_term;
        r.edge_term = corr.edge_term;
        r.correction = corr.total();
        r.score = r.cell_volume + r.correction;
        r.margin = r.score - rhombic_dodecahedron_volume();
        out.reports.push_back(r);
    }
    return out;
}

PeriodicExtension periodic_extension(const PackingPatch& p, double reach, double tol_geom) {
    if (!p.lattice) throw std::domain_error("patch has no lattice");
    const Lattice& lat = *p.lattice;
    double max_off = 0;
    for (const Vec3& o : lat.offsets) max_off = std::max(max_off, o.norm());
    Eigen::Matrix3d inv = lat.basis.inverse();
    // |n_j| <= ||row_j(B^-1)|| * |p - offset_j|; points needed lie within
    // max_off + reach of the origin region.
    std::array<int, 3> k;
    for (int j = 0; j < 3; ++j)
        k[j] = static_cast<int>(std::ceil(inv.row(j).norm() * (2 * max_off + reach))) + 1;

    PeriodicExtension ext;
    for (int n0 = -k[0]; n0 <= k[0]; ++n0)
        for (int n1 = -k[1]; n1 <= k[1]; ++n1)
            for (int n2 = -k[2]; n2 <= k[2]; ++n2) {
                Vec3 shift = lat.basis * Vec3(n0, n1, n2);
                bool is_domain = (n0 == 0 && n1 == 0 && n2 == 0);
                for (const Vec3& o : lat.offsets) {
                    if (is_domain)
                        ext.domain.push_back(static_cast<int>(ext.patch.centers.size()));
                    ext.patch.centers.push_back(o + shift);
                }
            }
    validate_patch(ext.patch, tol_geom);
    return ext;
}

Interval periodic_correction_sum(const PackingPatch& p, const ScoreParams& params) {
    validate_params(params);
    PeriodicExtension ext = periodic_extension(p, sqrt8().hi() + 0.1);
    Interval sum(0.0);
    for (int i : ext.domain) {
        CorrectionTerms c = correction_terms(ext.patch, i, params);
        sum += c.total();
    }
    return sum;
}

bool CancellationReport::pass() const {
    if (!imbalance_residual_hull.contains(0.0) ||
        imbalance_residual_hull.width() > imbalance_tol)
        return false;
    if (!multiplicity_exact) return false;
    if (periodic_sum) {
        if (!periodic_sum->contains(0.0)) return false;
        if (periodic_sum->lo() < -periodic_tol || periodic_sum->hi() > periodic_tol)
            return false;
    }
    return true;
}

CancellationReport run_cancellation(const PackingPatch& p, const ScoreParams& params,
                                    double imbalance_tol, double periodic_tol) {
    validate_params(params);
    CancellationReport rep;
    rep.imbalance_tol = imbalance_tol;
    rep.periodic_tol = periodic_tol;

    std::set<std::array<int, 3>> seen;
    Interval hull_iv(0.0);
    for (int i = 0; i < p.size(); ++i) {
        for (const Triangle& t : anchored_triangles(p, i, params.edge_cutoff)) {
            std::array<int, 3> key{t.v0, t.v1, t.v2};
            std::sort(key.begin(), key.end());
            if (!seen.insert(key).second) continue;
            hull_iv = hull(hull_iv, anchor_cancellation_residual(params.poly, t));
            ++rep.census_triangles;
        }
    }
    rep.imbalance_residual_hull = hull_iv;

    const SRule rule = make_s_rule(params.s_rule, params.edge_cutoff);
    std::set<std::array<int, 3>> seen_s;
    for (int i = 0; i < p.size(); ++i) {
        for (const Triangle& t : distinguished_triangles(p, i, rule)) {
            std::array<int, 3> key{t.v0, t.v1, t.v2};
            std::sort(key.begin(), key.end());
            if (!seen_s.insert(key).second) continue;
            ++rep.distinguished_triangles;
            int total = edge_multiplicity(t, t.v0) + edge_multiplicity(t, t.v1) +
                        edge_multiplicity(t, t.v2);
            if (total != 0) rep.multiplicity_exact = false;
        }
    }

    if (p.lattice) rep.periodic_sum = periodic_correction_sum(p, params);
    return rep;
}

} // namespace kepler
