// Acceptance suite: one criterion per check, one PASS/FAIL line each.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "kepler/prover.hpp"
#include "kepler/random.hpp"
#include "kepler/score.hpp"
#include "kepler/search.hpp"
#include "oracles.hpp"

using namespace kepler;
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Cli {
    int exit_code;
    std::string out;
};

Cli run_cli(const std::string& args) {
    std::string cmd = std::string(KEPLER_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Failure text, or empty when the criterion holds.
using Criterion = std::function<std::string()>;

std::string check_lattice_volume_via_cli(const std::string& kind, double* density_out,
                                         double* elapsed_out) {
    fs::path tmp = fs::temp_directory_path() / ("kepler-acceptance-" + kind + ".json");
    auto t0 = std::chrono::steady_clock::now();
    Cli gen = run_cli("gen " + kind + " 6 -o " + tmp.string());
    if (gen.exit_code != 0) return "gen " + kind + " 6 failed";
    Cli score = run_cli("score " + tmp.string() + " --json");
    double elapsed = seconds_since(t0);
    fs::remove(tmp);
    if (elapsed_out) *elapsed_out = elapsed;
    if (score.exit_code != 0) return "score failed";
    auto doc = ordered_json::parse(score.out);
    for (const auto& rep : doc["reports"]) {
        if (rep["center"] != 0) continue;
        double lo = parse_double(rep["volume_lo"].get<std::string>());
        double hi = parse_double(rep["volume_hi"].get<std::string>());
        double exact = 4.0 * std::sqrt(2.0);
        if (!(lo <= exact && exact <= hi)) return "origin volume interval misses 4*sqrt(2)";
        if (hi - lo > 1e-8)
            return "origin volume width " + format_double(hi - lo) + " exceeds 1e-8";
        if (density_out) *density_out = (4.0 * M_PI / 3.0) / (0.5 * (lo + hi));
        return "";
    }
    return "origin report missing";
}

ExprPtr random_expression(SplitMix64& rng, int dim, int depth) {
    if (depth == 0 || rng.below(4) == 0) {
        if (rng.below(3) == 0) return make_const(rng.uniform(-2, 2));
        return make_var(int(rng.below(dim)));
    }
    switch (rng.below(6)) {
        case 0: return make_node(ExprOp::Add, {random_expression(rng, dim, depth - 1),
                                               random_expression(rng, dim, depth - 1)});
        case 1: return make_node(ExprOp::Sub, {random_expression(rng, dim, depth - 1),
                                               random_expression(rng, dim, depth - 1)});
        case 2: return make_node(ExprOp::Mul, {random_expression(rng, dim, depth - 1),
                                               random_expression(rng, dim, depth - 1)});
        case 3: return make_node(ExprOp::PowInt, {random_expression(rng, dim, depth - 1)}, 2);
        case 4: return make_node(ExprOp::PowInt, {random_expression(rng, dim, depth - 1)}, 3);
        default:
            // sqrt of 1.5 + (.)^2 stays differentiable on any box.
            return make_node(
                ExprOp::Sqrt,
                {make_node(ExprOp::Add,
                           {make_const(1.5),
                            make_node(ExprOp::PowInt,
                                      {random_expression(rng, dim, depth - 1)}, 2)})});
    }
}

CertNode* nth_leaf(CertNode* node, long& k) {
    if (node->is_leaf()) return k-- == 0 ? node : nullptr;
    if (CertNode* hit = nth_leaf(node->left.get(), k)) return hit;
    return nth_leaf(node->right.get(), k);
}

} // namespace

int main() {
    std::vector<std::pair<std::string, Criterion>> criteria;

    // 1. FCC Voronoi volume + density through the CLI, timed.
    criteria.emplace_back("fcc-voronoi-volume-and-density", [] {
        double density = 0, elapsed = 0;
        std::string err = check_lattice_volume_via_cli("fcc", &density, &elapsed);
        if (!err.empty()) return err;
        if (std::fabs(density - 0.74048) > 1e-5)
            return std::string("implied density ") + format_double(density) +
                   " is not within 1e-5 of 0.74048";
        if (elapsed > 5.0)
            return std::string("runtime ") + format_double(elapsed) + "s exceeds 5s";
        return std::string();
    });

    // 2. HCP Voronoi volume.
    criteria.emplace_back("hcp-voronoi-volume", [] {
        return check_lattice_volume_via_cli("hcp", nullptr, nullptr);
    });

    // 3. FCC equality case with default parameters.
    criteria.emplace_back("fcc-equality-case", [] {
        PackingPatch p = gen_fcc(6.0);
        ScoreParams params = default_score_params();
        ScoreReport r = score_center(p, 0, params);
        if (!r.margin.contains(0.0)) return std::string("margin misses 0");
        if (r.margin.width() > 1e-7)
            return "margin width " + format_double(r.margin.width()) + " exceeds 1e-7";
        if (!r.triangle_term.contains(0.0) || r.triangle_term.width() > 1e-10)
            return std::string("triangle term fails the zero check");
        if (!r.edge_term.contains(0.0) || r.edge_term.width() > 1e-10)
            return std::string("edge term fails the zero check");
        return std::string();
    });

    // 4. Three-anchor cancellation over random triangles and quadratics.
    criteria.emplace_back("anchor-cancellation-identity", [] {
        SplitMix64 rng(4001);
        std::vector<Triangle> triangles;
        for (int i = 0; i < 1000; ++i) {
            Triangle t;
            t.v0 = 0; t.v1 = 1; t.v2 = 2;
            t.a = rng.uniform(2.0, 2.83);
            t.b = rng.uniform(2.0, 2.83);
            t.c = rng.uniform(2.0, 2.83);
            t.anchored = true;
            triangles.push_back(t);
        }
        for (int k = 0; k < 100; ++k) {
            QuadPoly poly{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            for (const Triangle& t : triangles) {
                Interval r = anchor_cancellation_residual(poly, t);
                if (!r.contains(0.0)) return std::string("residual interval misses 0");
                if (r.width() > 1e-10)
                    return "residual width " + format_double(r.width()) + " exceeds 1e-10";
            }
        }
        return std::string();
    });

    // 5. Multiplicity sums vanish exactly on every enumerated triangle.
    criteria.emplace_back("multiplicity-cancellation", [] {
        ScoreParams params = default_score_params();
        SRule rule = make_s_rule(params.s_rule, params.edge_cutoff);
        long enumerated = 0;
        for (const PackingPatch& p :
             {gen_fcc(4.5), gen_hcp(4.5), oracles::jittered_fcc_ball(4.0, 17)}) {
            for (int i = 0; i < p.size(); ++i) {
                for (const Triangle& t : distinguished_triangles(p, i, rule)) {
                    ++enumerated;
                    int sum = edge_multiplicity(t, t.v0) + edge_multiplicity(t, t.v1) +
                              edge_multiplicity(t, t.v2);
                    if (sum != 0) return std::string("multiplicity sum is nonzero");
                }
            }
        }
        if (enumerated == 0) return std::string("no distinguished triangles enumerated");
        return std::string();
    });

    // 6. Periodic correction sum over the 4-center fundamental domain.
    criteria.emplace_back("periodic-correction-sum", [] {
        PackingPatch cell = fcc_conventional_cell();
        SplitMix64 rng(6001);
        for (int draw = 0; draw < 20; ++draw) {
            ScoreParams params;
            params.poly = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            params.edge_weight = rng.uniform(-2, 2);
            params.edge_cutoff = rng.uniform(2.0, 2.82);
            Interval s = periodic_correction_sum(cell, params);
            if (s.lo() < -1e-8 || s.hi() > 1e-8)
                return "draw " + std::to_string(draw) + ": sum " + to_string(s) +
                       " leaves [-1e-8, 1e-8]";
        }
        return std::string();
    });

    // 7. Prover soundness: random expressions, sampling, replay, tampering.
    criteria.emplace_back("prover-soundness", [] {
        SplitMix64 rng(7001);
        int produced = 0;
        for (int round = 0; round < 50; ++round) {
            int dim = 1 + int(rng.below(4));
            ExprPtr e = random_expression(rng, dim, 3);
            BoxDomain d;
            for (int i = 0; i < dim; ++i) {
                double a = rng.uniform(-2, 2);
                d.bounds.emplace_back(a, a + rng.uniform(0.2, 1.5));
            }
            double mn = 1e300, mx = -1e300;
            std::vector<double> x(dim);
            for (int s = 0; s < 2000; ++s) {
                for (int i = 0; i < dim; ++i)
                    x[i] = rng.uniform(d.bounds[i].lo(), d.bounds[i].hi());
                double v = eval_point(*e, x);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            double target = mn - 0.05 * (mx - mn + 0.1);
            ProverOptions opts;
            opts.max_leaves = 2000;
            ProveResult res = prove_lower_bound(*e, d, target, opts);
            if (!proven(res)) continue;
            ++produced;
            const auto& cert = std::get<ProofCertificate>(res);
            double floor = target - opts.slack - 1e-12;
            for (int s = 0; s < 100000; ++s) {
                for (int i = 0; i < dim; ++i)
                    x[i] = rng.uniform(d.bounds[i].lo(), d.bounds[i].hi());
                if (eval_point(*e, x) < floor)
                    return "round " + std::to_string(round) + ": sample violates the bound";
            }
            if (!replay_certificate(*e, cert, target))
                return "round " + std::to_string(round) + ": honest replay failed";
            ordered_json j = certificate_to_json(cert);
            long tampers = std::min<long>(cert.leaves, 16);
            for (long t = 0; t < tampers; ++t) {
                long idx = tampers == 1 ? 0 : t * (cert.leaves - 1) / (tampers - 1);
                ProofCertificate copy = certificate_from_json(j);
                long k = idx;
                CertNode* leaf = nth_leaf(copy.root.get(), k);
                if (!leaf) return std::string("internal: leaf walk failed");
                if (leaf->leaf->kind == LeafWitness::Kind::Infeasible) {
                    Interval b = leaf->leaf->box[0];
                    leaf->leaf->box[0] = Interval(b.lo(), b.lo() + 0.9 * b.width());
                } else {
                    leaf->leaf->bound += 1.0;
                }
                if (replay_certificate(*e, copy, target))
                    return "round " + std::to_string(round) + ": tampered leaf " +
                           std::to_string(idx) + " replayed true";
            }
        }
        if (produced < 25)
            return "only " + std::to_string(produced) + "/50 certificates produced";
        return std::string();
    });

    // 8. Sharpness fixture around the exact minimum -1.02.
    criteria.emplace_back("prover-sharpness-fixture", [] {
        ExprPtr e = parse_expr("(- (* 2 x2) (+ x0 x1))");
        BoxDomain d;
        for (int i = 0; i < 3; ++i) d.bounds.emplace_back(2.0, 2.51);
        auto t0 = std::chrono::steady_clock::now();
        ProveResult ok = prove_lower_bound(*e, d, -1.03);
        double elapsed = seconds_since(t0);
        if (!proven(ok)) return std::string("target -1.03 did not prove");
        const auto& cert = std::get<ProofCertificate>(ok);
        if (cert.leaves > 10000)
            return "certificate has " + std::to_string(cert.leaves) + " leaves (> 1e4)";
        if (elapsed > 10.0)
            return "proof took " + format_double(elapsed) + "s (> 10s)";
        if (!replay_certificate(*e, cert, -1.03))
            return std::string("certificate does not replay");
        ProveResult no = prove_lower_bound(*e, d, -1.01);
        if (proven(no)) return std::string("target -1.01 must stay undecided (true min -1.02)");
        return std::string();
    });

    // 9. Triangle census at the fcc origin against the direct oracle.
    criteria.emplace_back("triangle-census", [] {
        PackingPatch p = gen_fcc(6.0);
        auto tris = anchored_triangles(p, 0, 2.5);
        int oracle = oracles::triangle_count_at(p.centers, 0, 2.5);
        if (oracle != 24)
            return "oracle count " + std::to_string(oracle) + " != 24";
        if ((int)tris.size() != 24)
            return "census count " + std::to_string(tris.size()) + " != 24";
        return std::string();
    });

    // 10. Interval kernel containment suite and the Cayley-Menger fixture.
    criteria.emplace_back("interval-kernel", [] {
        SplitMix64 rng(10001);
        for (int iter = 0; iter < 100000; ++iter) {
            double scale = std::pow(10.0, rng.uniform(-3, 3));
            double a1 = rng.uniform(-scale, scale), a2 = rng.uniform(-scale, scale);
            double b1 = rng.uniform(-scale, scale), b2 = rng.uniform(-scale, scale);
            Interval x(std::min(a1, a2), std::max(a1, a2));
            Interval y(std::min(b1, b2), std::max(b1, b2));
            double a = rng.uniform(x.lo(), x.hi());
            double b = rng.uniform(y.lo(), y.hi());
            if (!(x + y).contains(a + b)) return std::string("addition containment failed");
            if (!(x - y).contains(a - b)) return std::string("subtraction containment failed");
            if (!(x * y).contains(a * b)) return std::string("multiplication containment failed");
            if (!y.contains_zero() && !(x / y).contains(a / b))
                return std::string("division containment failed");
            if (x.hi() >= 0 && !sqrt(x).contains(std::sqrt(std::max(a, 0.0))))
                return std::string("sqrt containment failed");
            if (!pow_int(x, 2).contains(a * a))
                return std::string("pow containment failed");
            if (!min(x, y).contains(std::min(a, b)) || !max(x, y).contains(std::max(a, b)))
                return std::string("min/max containment failed");
        }
        Interval cm = cayley_menger_volume(2, 2, 2, 2, 2, 2);
        if (!cm.contains(2.0 * std::sqrt(2.0) / 3.0))
            return std::string("Cayley-Menger fixture misses 2*sqrt(2)/3");
        if (cm.width() > 1e-10)
            return "Cayley-Menger width " + format_double(cm.width()) + " exceeds 1e-10";
        return std::string();
    });

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        std::string err;
        try {
            err = criteria[i].second();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        double dt = seconds_since(t0);
        if (err.empty()) {
            std::printf("PASS  %2zu  %-34s (%.2fs)\n", i + 1, criteria[i].first.c_str(), dt);
        } else {
            std::printf("FAIL  %2zu  %-34s %s\n", i + 1, criteria[i].first.c_str(), err.c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
