#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kepler/packing.hpp"
#include "kepler/voronoi.hpp"

namespace kepler {

/// Quadratic polynomial q2 x^2 + q1 x + q0, evaluated in Horner form over
/// intervals (containment, not tightness, is the contract).
struct QuadPoly {
    double q2 = 0, q1 = 0, q0 = 0;

    Interval operator()(const Interval& x) const {
        return (Interval(q2) * x + Interval(q1)) * x + Interval(q0);
    }
};

/// Parameters of the correction term: the quadratic, the weight of the
/// distinguished-edge sum, the triangle edge cutoff in [2, sqrt(8)], and
/// the named membership rule for distinguished triangles.
struct ScoreParams {
    QuadPoly poly;
    double edge_weight = 1.0;   // multiplies the distinguished-edge sum
    double edge_cutoff = 2.51;  // max edge length of the plain triangle family
    std::string s_rule = "default";
};

/// Throws std::domain_error unless 2 <= edge_cutoff <= sqrt8().hi().
void validate_params(const ScoreParams& params);

/// Smoke-test defaults: poly(x) ~ sqrt(8) - x (q2 = 0, q1 = -1,
/// q0 = midpoint of the sqrt(8) interval), weight 1, cutoff 2.51. These are
/// exploration values, not distinguished ones.
ScoreParams default_score_params();

/// Volume of the rhombic dodecahedron with inradius 1 (the FCC cell),
/// computed as 2 * sqrt(8) = 4 * sqrt(2) rather than hardcoded.
Interval rhombic_dodecahedron_volume();

/// Cross-check rhombic_dodecahedron_volume against a freshly computed FCC
/// cell volume; throws internal_error on mismatch. Runs once per process.
void self_check_reference_volume();

/// The anchored combination 2 poly(c) - poly(a) - poly(b); requires an
/// anchored triangle (c opposite the anchor).
Interval triangle_imbalance(const QuadPoly& poly, const Triangle& t);

/// Multiplicity of a distinguished triangle at one of its vertices: -1 when
/// the vertex is an endpoint of the distinguished edge, 2 otherwise.
int edge_multiplicity(const Triangle& t, int center);

/// Sum of triangle_imbalance over the three anchorings of a triangle.
/// Identically zero in exact arithmetic; the interval must contain 0.
Interval anchor_cancellation_residual(const QuadPoly& poly, const Triangle& t);

struct CorrectionTerms {
    Interval triangle_term{0.0};  // sum of anchored imbalances
    Interval edge_term{0.0};      // weight * sum of multiplicity * (sqrt(8) - w)
    Interval total() const { return triangle_term + edge_term; }
};

/// Both correction sums at center i.
CorrectionTerms correction_terms(const PackingPatch& p, int i, const ScoreParams& params);

struct ScoreReport {
    int center = -1;
    Interval cell_volume{0.0};
    Interval triangle_term{0.0};
    Interval edge_term{0.0};
    Interval correction{0.0};
    Interval score{0.0};   // cell_volume + correction
    Interval margin{0.0};  // score - rhombic_dodecahedron_volume()
};

/// Score one interior center; throws std::domain_error when the cell is not
/// interior-certified at this cutoff.
ScoreReport score_center(const PackingPatch& p, int i, const ScoreParams& params,
                         double cutoff = 6.0, double inflate_halfwidth = 1e-11);

struct PatchScore {
    std::vector<ScoreReport> reports;    // one per interior center, by index
    std::vector<int> non_interior;       // centers skipped with reason
};

PatchScore score_patch(const PackingPatch& p, const ScoreParams& params,
                       double cutoff = 6.0, double inflate_halfwidth = 1e-11);

/// Periodic extension of a patch: enough lattice translates that every
/// triangle within `reach` of a fundamental-domain center lies wholly in
/// the extension. `domain` indexes one representative per offset.
struct PeriodicExtension {
    PackingPatch patch;
    std::vector<int> domain;
};

PeriodicExtension periodic_extension(const PackingPatch& p, double reach,
                                     double tol_geom = 1e-12);

/// Sum of the correction term over the fundamental domain, with the
/// triangle census taken in the periodic extension. Cancellation makes this
/// an interval around zero for any periodic patch and any parameters.
/// Throws std::domain_error when the patch has no lattice.
Interval periodic_correction_sum(const PackingPatch& p, const ScoreParams& params);

struct CancellationReport {
    std::string patch_id;
    long census_triangles = 0;
    Interval imbalance_residual_hull{0.0};  // hull of 3-anchor residuals
    long distinguished_triangles = 0;
    bool multiplicity_exact = true;         // all 3-vertex multiplicity sums == 0
    std::optional<Interval> periodic_sum;   // absent (with notice) if no lattice
    double imbalance_tol = 1e-10;
    double periodic_tol = 1e-8;

    bool pass() const;
};

CancellationReport run_cancellation(const PackingPatch& p, const ScoreParams& params,
                                    double imbalance_tol = 1e-10,
                                    double periodic_tol = 1e-8);

} // namespace kepler
