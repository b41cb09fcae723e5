#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kepler/score.hpp"

namespace kepler {

/// Parameter search specification: one axis per score parameter, a list of
/// sample packings ("fcc:R", "hcp:R", or a patch file path), and a
/// strategy. The objective is fixed: maximize the minimum margin.lo over
/// all interior centers of all sample packings.
struct SearchSpec {
    struct Axis {
        std::vector<double> values;  // explicit grid values
        double min = 0, max = 0;     // or a range
        int count = 0;               // grid steps for a range axis
        bool is_range = false;
    };
    Axis q2, q1, q0, weight, cutoff;
    std::vector<std::string> packings;
    enum class Strategy { Grid, Random } strategy = Strategy::Grid;
    std::uint64_t seed = 0;
    int count = 0;  // random draws

    /// Throws std::runtime_error for malformed or infeasible specs
    /// (cutoff outside [2, sqrt(8)], empty axes, count < 1).
    static SearchSpec from_json(const nlohmann::ordered_json& j);
};

struct SearchRow {
    ScoreParams params;
    double min_margin_lo = 0;
    std::string worst_packing;
    int worst_center = -1;
    bool any_interior = false;
};

/// Evaluate the objective at every parameter point; rows come back ranked
/// by min_margin_lo descending (ties keep generation order). Deterministic
/// under a fixed seed. Results are numerical evidence only, never proofs.
std::vector<SearchRow> run_search(const SearchSpec& spec, double voronoi_cutoff = 6.0,
                                  double inflate_halfwidth = 1e-11);

/// Load a sample packing by name ("fcc:R" / "hcp:R") or file path.
PackingPatch load_sample_packing(const std::string& name, double tol_geom = 1e-12);

// ScoreReport serialization: flat decimal lo/hi pairs per field.
nlohmann::ordered_json score_report_to_json(const ScoreReport& r);
std::string score_report_csv_header();
std::string score_report_csv_row(const ScoreReport& r);

} // namespace kepler
