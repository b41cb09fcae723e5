// kepler: rigorous sphere-packing score evaluation, cancellation checks,
// parameter search, and a certificate-emitting inequality prover.
//
// Exit codes: 0 pass/proven, 1 fail/undecided/empty result,
//             2 usage or parse error, 3 internal invariant violation.

#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "kepler/config.hpp"
#include "kepler/prover.hpp"
#include "kepler/search.hpp"

namespace {

using namespace kepler;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

Interval pi_interval() {
    double pi = std::numbers::pi_v<double>;
    return Interval(detail::next_down(pi), detail::next_up(pi));
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const std::string& kind, double radius, const std::string& out_path) {
    PackingPatch p = kind == "fcc" ? gen_fcc(radius) : gen_hcp(radius);
    std::ostringstream os;
    save_patch(p, os);
    write_text(out_path, os.str());
    return kExitPass;
}

// ---------------------------------------------------------------------------
// score

int cmd_score(const std::string& patch_path, const ScoreParams& params, const Config& cfg,
              const std::string& format, const std::string& out_path) {
    self_check_reference_volume();
    PackingPatch p = load_sample_packing(patch_path, cfg.tol_geom);
    PatchScore ps = score_patch(p, params, cfg.cutoff, cfg.inflate_halfwidth);

    std::ostringstream os;
    Interval volume_sum(0.0);
    for (const ScoreReport& r : ps.reports) volume_sum += r.cell_volume;

    const ScoreReport* worst = nullptr;
    for (const ScoreReport& r : ps.reports)
        if (!worst || r.margin.lo() < worst->margin.lo()) worst = &r;

    std::optional<Interval> density;
    if (!ps.reports.empty()) {
        Interval ball = Interval(4.0) * pi_interval() / Interval(3.0);
        density = Interval(double(ps.reports.size())) * ball / volume_sum;
    }
    Interval bound = pi_interval() / sqrt(Interval(18.0));

    if (format == "json") {
        ordered_json j;
        j["reports"] = ordered_json::array();
        for (const ScoreReport& r : ps.reports) j["reports"].push_back(score_report_to_json(r));
        j["non_interior"] = ps.non_interior;
        ordered_json summary;
        summary["interior"] = ps.reports.size();
        if (worst) {
            summary["min_margin_lo"] = format_double(worst->margin.lo());
            summary["min_margin_center"] = worst->center;
        }
        if (density) {
            summary["density_lo"] = format_double(density->lo());
            summary["density_hi"] = format_double(density->hi());
            summary["density_consistent_with_bound"] = density->lo() <= bound.hi();
        }
        j["summary"] = std::move(summary);
        os << j.dump(2) << "\n";
    } else if (format == "csv") {
        os << score_report_csv_header() << "\n";
        for (const ScoreReport& r : ps.reports) os << score_report_csv_row(r) << "\n";
    } else {
        for (const ScoreReport& r : ps.reports) {
            os << "center " << r.center
               << "  volume " << to_string(r.cell_volume)
               << "  correction " << to_string(r.correction)
               << "  margin " << to_string(r.margin) << "\n";
        }
        os << "interior " << ps.reports.size()
           << "  non-interior " << ps.non_interior.size() << "\n";
        if (worst)
            os << "min margin.lo " << format_double(worst->margin.lo())
               << " at center " << worst->center << "\n";
        if (density) {
            os << "density " << to_string(*density)
               << (density->lo() <= bound.hi() ? "  consistent with 0.74048 bound"
                                               : "  EXCEEDS 0.74048 bound")
               << "  (informational, not a proof)\n";
        }
    }
    write_text(out_path, os.str());
    return ps.reports.empty() ? kExitFail : kExitPass;
}

// ---------------------------------------------------------------------------
// cancel-check

int cmd_cancel(const std::string& patch_path, const ScoreParams& params, const Config& cfg,
               const std::string& format, const std::string& out_path) {
    self_check_reference_volume();
    PackingPatch p = load_sample_packing(patch_path, cfg.tol_geom);
    CancellationReport rep = run_cancellation(p, params);
    rep.patch_id = patch_path;

    std::ostringstream os;
    if (format == "json") {
        ordered_json j;
        j["patch"] = rep.patch_id;
        j["census_triangles"] = rep.census_triangles;
        j["imbalance_residual_lo"] = format_double(rep.imbalance_residual_hull.lo());
        j["imbalance_residual_hi"] = format_double(rep.imbalance_residual_hull.hi());
        j["distinguished_triangles"] = rep.distinguished_triangles;
        j["multiplicity_exact"] = rep.multiplicity_exact;
        if (rep.periodic_sum) {
            j["periodic_sum_lo"] = format_double(rep.periodic_sum->lo());
            j["periodic_sum_hi"] = format_double(rep.periodic_sum->hi());
        } else {
            j["periodic_sum_skipped"] = "patch has no lattice";
        }
        j["pass"] = rep.pass();
        os << j.dump(2) << "\n";
    } else {
        os << "imbalance residual hull " << to_string(rep.imbalance_residual_hull)
           << " over " << rep.census_triangles << " triangles\n";
        os << "multiplicity sums " << (rep.multiplicity_exact ? "all zero" : "NONZERO")
           << " over " << rep.distinguished_triangles << " distinguished triangles\n";
        if (rep.periodic_sum)
            os << "periodic correction sum " << to_string(*rep.periodic_sum) << "\n";
        else
            os << "periodic sum skipped: patch has no lattice (identity checks only)\n";
        os << (rep.pass() ? "PASS" : "FAIL") << "\n";
    }
    write_text(out_path, os.str());
    return rep.pass() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// search

int cmd_search(const std::string& spec_path, const Config& cfg, const std::string& format,
               const std::string& out_path) {
    self_check_reference_volume();
    ordered_json j = ordered_json::parse(slurp(spec_path));
    SearchSpec spec = SearchSpec::from_json(j);
    std::vector<SearchRow> rows = run_search(spec, cfg.cutoff, cfg.inflate_halfwidth);

    std::ostringstream os;
    auto row_cells = [](const SearchRow& r) {
        std::vector<std::string> c = {
            format_double(r.params.poly.q2), format_double(r.params.poly.q1),
            format_double(r.params.poly.q0), format_double(r.params.edge_weight),
            format_double(r.params.edge_cutoff),
            r.any_interior ? format_double(r.min_margin_lo) : std::string("n/a"),
            r.any_interior ? r.worst_packing : std::string("n/a"),
            std::to_string(r.worst_center)};
        return c;
    };
    const char* headers[] = {"q2", "q1", "q0", "weight", "cutoff",
                             "min_margin_lo", "worst_packing", "worst_center"};
    if (format == "csv") {
        for (int k = 0; k < 8; ++k) os << (k ? "," : "") << headers[k];
        os << "\n";
        for (const SearchRow& r : rows) {
            auto cells = row_cells(r);
            for (int k = 0; k < 8; ++k) os << (k ? "," : "") << cells[k];
            os << "\n";
        }
    } else {
        os << "# numerical evidence only, not a proof; ranked by min margin.lo\n";
        for (int k = 0; k < 8; ++k) os << (k ? "\t" : "") << headers[k];
        os << "\n";
        for (const SearchRow& r : rows) {
            auto cells = row_cells(r);
            for (int k = 0; k < 8; ++k) os << (k ? "\t" : "") << cells[k];
            os << "\n";
        }
    }
    write_text(out_path, os.str());
    return kExitPass;
}

// ---------------------------------------------------------------------------
// prove / replay

int cmd_prove(const std::string& expr_path, const std::string& domain_path, double target,
              const ProverOptions& opts, const std::string& out_path) {
    ExprPtr e;
    try {
        e = parse_expr(slurp(expr_path));
    } catch (const parse_error& pe) {
        std::cerr << "expression parse error at " << expr_path << ":" << pe.what() << "\n";
        return kExitUsage;
    }
    BoxDomain d = domain_from_json(ordered_json::parse(slurp(domain_path)));
    // Widen user bounds outward one ulp so the proof covers the written
    // decimals even when they are not exactly representable.
    for (Interval& b : d.bounds)
        b = Interval(detail::next_down(b.lo()), detail::next_up(b.hi()));
    ProveResult res = prove_lower_bound(*e, d, target, opts);
    if (proven(res)) {
        const auto& cert = std::get<ProofCertificate>(res);
        write_text(out_path, certificate_to_json(cert).dump(2) + "\n");
        std::cerr << "proven: " << cert.leaves << " leaves\n";
        return kExitPass;
    }
    const auto& fail = std::get<FailureReport>(res);
    write_text(out_path, failure_to_json(fail).dump(2) + "\n");
    std::cerr << "undecided after " << fail.leaves_explored << " leaves\n";
    return kExitFail;
}

int cmd_replay(const std::string& cert_path) {
    ordered_json j = ordered_json::parse(slurp(cert_path));
    ProofCertificate cert = certificate_from_json(j);
    ExprPtr e = parse_expr(cert.expr_text);
    ReplayIssue issue;
    bool ok = replay_certificate(*e, cert, cert.target, &issue);
    if (ok) {
        std::cout << "replay OK: " << cert.leaves << " leaves certify target "
                  << format_double(cert.target) << " (slack "
                  << format_double(cert.slack) << ")\n";
        return kExitPass;
    }
    std::cout << "replay FAILED at " << issue.path << ": " << issue.what << "\n";
    return kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigorous sphere-packing score toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "flat key = value configuration file");

    Config cfg;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a packing patch");
    std::string gen_kind, gen_out = "-";
    double gen_radius = 0;
    gen->add_option("kind", gen_kind, "fcc or hcp")->required()
        ->check(CLI::IsMember({"fcc", "hcp"}));
    gen->add_option("radius", gen_radius, "patch radius (ball radii)")->required();
    gen->add_option("-o,--output", gen_out, "output file (default stdout)");

    // shared score parameters
    ScoreParams params = default_score_params();
    auto add_param_flags = [&params, &cfg](CLI::App* cmd) {
        cmd->add_option("--q2", params.poly.q2, "quadratic coefficient");
        cmd->add_option("--q1", params.poly.q1, "linear coefficient");
        cmd->add_option("--q0", params.poly.q0, "constant coefficient");
        cmd->add_option("--edge-weight", params.edge_weight,
                        "weight of the distinguished-edge sum");
        cmd->add_option("--edge-cutoff", params.edge_cutoff,
                        "triangle edge cutoff in [2, sqrt(8)]");
        cmd->add_option("--s-rule", params.s_rule, "distinguished-triangle rule name");
        cmd->add_option("--voronoi-cutoff", cfg.cutoff, "neighbor cutoff for cells");
    };

    // score
    auto* score = app.add_subcommand("score", "score every interior center of a patch");
    std::string score_patch_arg, score_out = "-", score_format = "text";
    score->add_option("patch", score_patch_arg, "patch file, fcc:R, or hcp:R")->required();
    score->add_option("-o,--output", score_out, "output file (default stdout)");
    score->add_flag_callback("--csv", [&] { score_format = "csv"; }, "CSV rows");
    score->add_flag_callback("--json", [&] { score_format = "json"; }, "structured output");
    add_param_flags(score);

    // cancel-check
    auto* cancel = app.add_subcommand("cancel-check",
                                      "verify the cancellation identities on a patch");
    std::string cancel_patch_arg, cancel_out = "-", cancel_format = "text";
    cancel->add_option("patch", cancel_patch_arg, "patch file, fcc:R, or hcp:R")->required();
    cancel->add_option("-o,--output", cancel_out, "output file (default stdout)");
    cancel->add_flag_callback("--json", [&] { cancel_format = "json"; }, "structured output");
    add_param_flags(cancel);

    // search
    auto* search = app.add_subcommand("search", "rank score parameters over sample packings");
    std::string search_spec_path, search_out = "-", search_format = "text";
    search->add_option("--spec", search_spec_path, "search specification (JSON)")->required();
    search->add_option("-o,--output", search_out, "output file (default stdout)");
    search->add_flag_callback("--csv", [&] { search_format = "csv"; }, "CSV rows");

    // prove
    auto* prove = app.add_subcommand("prove", "prove expr >= target over a box domain");
    std::string prove_expr, prove_domain, prove_out = "-";
    double prove_target = 0;
    ProverOptions popts;
    prove->add_option("--expr", prove_expr, "expression file (prefix s-expression)")->required();
    prove->add_option("--domain", prove_domain, "domain file (JSON bounds/constraints)")->required();
    prove->add_option("--target", prove_target, "lower bound to certify")->required();
    prove->add_option("-o,--output", prove_out, "certificate / failure report file");
    prove->add_option("--slack", popts.slack, "target relaxation (default 1e-9)");
    prove->add_option("--max-depth", popts.max_depth, "subdivision depth limit");
    prove->add_option("--max-leaves", popts.max_leaves, "leaf budget");
    bool no_lp = false;
    prove->add_flag("--no-lp", no_lp, "disable the linear-programming layer");

    // replay
    auto* replay = app.add_subcommand("replay", "re-verify a proof certificate");
    std::string replay_cert;
    replay->add_option("certificate", replay_cert, "certificate file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            // Precedence: defaults < config file < explicit flags.
            double flag_cutoff = cfg.cutoff;
            bool cutoff_set = score->count("--voronoi-cutoff") > 0 ||
                              cancel->count("--voronoi-cutoff") > 0;
            cfg = Config::load(config_path);
            if (cutoff_set) cfg.cutoff = flag_cutoff;
        }
        if (prove->count("--slack") == 0) popts.slack = cfg.slack;
        if (prove->count("--max-depth") == 0) popts.max_depth = cfg.max_depth;
        if (prove->count("--max-leaves") == 0) popts.max_leaves = cfg.max_leaves;
        popts.use_lp = !no_lp;

        if (gen->parsed()) return cmd_gen(gen_kind, gen_radius, gen_out);
        if (score->parsed()) return cmd_score(score_patch_arg, params, cfg, score_format, score_out);
        if (cancel->parsed()) return cmd_cancel(cancel_patch_arg, params, cfg, cancel_format, cancel_out);
        if (search->parsed()) return cmd_search(search_spec_path, cfg, search_format, search_out);
        if (prove->parsed()) return cmd_prove(prove_expr, prove_domain, prove_target, popts, prove_out);
        if (replay->parsed()) return cmd_replay(replay_cert);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const internal_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return kExitInternal;
    } catch (const parse_error& e) {
        std::cerr << "parse error at " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
