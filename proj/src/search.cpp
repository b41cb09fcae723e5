#include "kepler/search.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "kepler/random.hpp"

namespace kepler {

namespace {

using ordered_json = nlohmann::ordered_json;

SearchSpec::Axis axis_from_json(const ordered_json& j, const char* name) {
    SearchSpec::Axis a;
    if (j.is_array()) {
        for (const auto& v : j) a.values.push_back(v.get<double>());
        if (a.values.empty())
            throw std::runtime_error(std::string("axis '") + name + "' has no values");
        return a;
    }
    if (j.is_number()) {
        a.values.push_back(j.get<double>());
        return a;
    }
    if (j.is_object() && j.contains("min") && j.contains("max")) {
        a.is_range = true;
        a.min = j["min"].get<double>();
        a.max = j["max"].get<double>();
        a.count = j.value("count", 2);
        if (a.min > a.max)
            throw std::runtime_error(std::string("axis '") + name + "': min exceeds max");
        if (a.count < 1)
            throw std::runtime_error(std::string("axis '") + name + "': count must be >= 1");
        return a;
    }
    throw std::runtime_error(std::string("axis '") + name +
                             "' must be a number, an array of values, or {min, max[, count]}");
}

std::vector<double> grid_points(const SearchSpec::Axis& a) {
    if (!a.is_range) return a.values;
    std::vector<double> out;
    if (a.count == 1) {
        out.push_back(a.min);
        return out;
    }
    for (int i = 0; i < a.count; ++i)
        out.push_back(a.min + (a.max - a.min) * double(i) / double(a.count - 1));
    return out;
}

double axis_lo(const SearchSpec::Axis& a) {
    return a.is_range ? a.min : *std::min_element(a.values.begin(), a.values.end());
}

double axis_hi(const SearchSpec::Axis& a) {
    return a.is_range ? a.max : *std::max_element(a.values.begin(), a.values.end());
}

} // namespace

SearchSpec SearchSpec::from_json(const ordered_json& j) {
    if (!j.is_object()) throw std::runtime_error("search spec must be a JSON object");
    SearchSpec spec;
    spec.q2 = j.contains("q2") ? axis_from_json(j["q2"], "q2") : Axis{{0.0}, 0, 0, 0, false};
    spec.q1 = j.contains("q1") ? axis_from_json(j["q1"], "q1") : Axis{{0.0}, 0, 0, 0, false};
    spec.q0 = j.contains("q0") ? axis_from_json(j["q0"], "q0") : Axis{{0.0}, 0, 0, 0, false};
    spec.weight = j.contains("weight") ? axis_from_json(j["weight"], "weight")
                                       : Axis{{1.0}, 0, 0, 0, false};
    spec.cutoff = j.contains("cutoff") ? axis_from_json(j["cutoff"], "cutoff")
                                       : Axis{{2.51}, 0, 0, 0, false};
    if (axis_lo(spec.cutoff) < 2.0 || axis_hi(spec.cutoff) > sqrt8().hi())
        throw std::runtime_error("cutoff axis must stay within [2, sqrt(8)]");

    if (!j.contains("packings") || !j["packings"].is_array() || j["packings"].empty())
        throw std::runtime_error("search spec needs a nonempty \"packings\" list");
    for (const auto& p : j["packings"]) spec.packings.push_back(p.get<std::string>());

    if (j.contains("strategy")) {
        const auto& s = j["strategy"];
        std::string kind = s.value("kind", "grid");
        if (kind == "grid") {
            spec.strategy = Strategy::Grid;
        } else if (kind == "random") {
            spec.strategy = Strategy::Random;
            spec.seed = s.value("seed", std::uint64_t(0));
            spec.count = s.value("count", 0);
            if (spec.count < 1)
                throw std::runtime_error("random strategy needs count >= 1");
        } else {
            throw std::runtime_error("unknown strategy kind: " + kind);
        }
    }
    return spec;
}

PackingPatch load_sample_packing(const std::string& name, double tol_geom) {
    auto colon = name.find(':');
    if (colon != std::string::npos) {
        std::string gen = name.substr(0, colon);
        if (gen == "fcc" || gen == "hcp") {
            double radius = parse_double(name.substr(colon + 1));
            return gen == "fcc" ? gen_fcc(radius) : gen_hcp(radius);
        }
    }
    return load_patch_file(name, tol_geom);
}

std::vector<SearchRow> run_search(const SearchSpec& spec, double voronoi_cutoff,
                                  double inflate_halfwidth) {
    // Parameter points in deterministic order.
    std::vector<ScoreParams> points;
    if (spec.strategy == SearchSpec::Strategy::Grid) {
        for (double q2 : grid_points(spec.q2))
            for (double q1 : grid_points(spec.q1))
                for (double q0 : grid_points(spec.q0))
                    for (double w : grid_points(spec.weight))
                        for (double r : grid_points(spec.cutoff)) {
                            ScoreParams p;
                            p.poly = {q2, q1, q0};
                            p.edge_weight = w;
                            p.edge_cutoff = r;
                            points.push_back(p);
                        }
    } else {
        SplitMix64 rng(spec.seed);
        auto draw = [&rng](const SearchSpec::Axis& a) {
            return rng.uniform(axis_lo(a), axis_hi(a));
        };
        for (int i = 0; i < spec.count; ++i) {
            ScoreParams p;
            p.poly.q2 = draw(spec.q2);
            p.poly.q1 = draw(spec.q1);
            p.poly.q0 = draw(spec.q0);
            p.edge_weight = draw(spec.weight);
            p.edge_cutoff = draw(spec.cutoff);
            points.push_back(p);
        }
    }
    for (const ScoreParams& p : points) validate_params(p);

    // Voronoi cells are parameter-independent: compute interior volumes once
    // per packing, then only the census sums vary across rows.
    struct Cached {
        PackingPatch patch;
        std::vector<std::pair<int, Interval>> interior_volumes;
    };
    std::vector<Cached> patches;
    patches.reserve(spec.packings.size());
    for (const std::string& name : spec.packings) {
        Cached c;
        c.patch = load_sample_packing(name);
        for (int i = 0; i < c.patch.size(); ++i) {
            VoronoiCell cell = voronoi_cell(c.patch, i, voronoi_cutoff);
            if (cell.interior_certified)
                c.interior_volumes.emplace_back(i, cell_volume(cell, inflate_halfwidth));
        }
        patches.push_back(std::move(c));
    }

    const Interval reference = rhombic_dodecahedron_volume();
    std::vector<SearchRow> rows;
    rows.reserve(points.size());
    for (const ScoreParams& p : points) {
        SearchRow row;
        row.params = p;
        row.min_margin_lo = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < patches.size(); ++k) {
            for (const auto& [i, volume] : patches[k].interior_volumes) {
                row.any_interior = true;
                Interval margin = volume + correction_terms(patches[k].patch, i, p).total() -
                                  reference;
                if (margin.lo() < row.min_margin_lo) {
                    row.min_margin_lo = margin.lo();
                    row.worst_packing = spec.packings[k];
                    row.worst_center = i;
                }
            }
        }
        if (!row.any_interior) row.min_margin_lo = -std::numeric_limits<double>::infinity();
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SearchRow& x, const SearchRow& y) {
        return x.min_margin_lo > y.min_margin_lo;
    });
    return rows;
}

nlohmann::ordered_json score_report_to_json(const ScoreReport& r) {
    ordered_json j;
    j["center"] = r.center;
    auto put = [&j](const char* name, const Interval& v) {
        j[std::string(name) + "_lo"] = format_double(v.lo());
        j[std::string(name) + "_hi"] = format_double(v.hi());
    };
    put("volume", r.cell_volume);
    put("triangle_term", r.triangle_term);
    put("edge_term", r.edge_term);
    put("correction", r.correction);
    put("score", r.score);
    put("margin", r.margin);
    return j;
}

std::string score_report_csv_header() {
    return "center,volume_lo,volume_hi,triangle_term_lo,triangle_term_hi,"
           "edge_term_lo,edge_term_hi,correction_lo,correction_hi,"
           "score_lo,score_hi,margin_lo,margin_hi";
}

std::string score_report_csv_row(const ScoreReport& r) {
    std::ostringstream os;
    os << r.center;
    for (const Interval* v : {&r.cell_volume, &r.triangle_term, &r.edge_term,
                              &r.correction, &r.score, &r.margin})
        os << "," << format_double(v->lo()) << "," << format_double(v->hi());
    return os.str();
}

} // namespace kepler
