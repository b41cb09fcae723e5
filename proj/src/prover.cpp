#include "kepler/prover.hpp"

#include <algorithm>
#include <cmath>

#include "kepler/lp.hpp"

namespace kepler {

void validate_domain(const BoxDomain& d, int expr_dimension) {
    if (d.bounds.empty()) throw std::domain_error("domain has no bounds");
    if (static_cast<int>(d.bounds.size()) < expr_dimension)
        throw std::domain_error("domain dimension is smaller than the expression needs");
    for (const Interval& b : d.bounds)
        if (!b.bounded()) throw std::domain_error("domain bounds must be finite");
    for (const LinearConstraint& c : d.constraints) {
        if (c.coeffs.size() != d.bounds.size())
            throw std::domain_error("constraint coefficient count must match the dimension");
        if (!std::isfinite(c.rhs))
            throw std::domain_error("constraint right-hand side must be finite");
    }
    if (!d.constraints.empty() && !constraints_feasible(d.bounds, d.constraints))
        throw std::domain_error("domain is empty: constraints conflict with the bounds");
}

bool constraints_feasible(std::span<const Interval> box,
                          const std::vector<LinearConstraint>& cons) {
    if (cons.empty()) return true;
    const int n = static_cast<int>(box.size());
    ExactLp lp;
    lp.c.assign(n, 0);
    for (const LinearConstraint& c : cons) {
        std::vector<Rational> row(n);
        for (int j = 0; j < n; ++j) row[j] = rational_from(c.coeffs[j]);
        lp.A.push_back(std::move(row));
        lp.b.push_back(rational_from(c.rhs));
    }
    for (int j = 0; j < n; ++j) {
        lp.lo.push_back(rational_from(box[j].lo()));
        lp.hi.push_back(rational_from(box[j].hi()));
    }
    return solve_exact_min(lp).status == ExactLpResult::Status::Optimal;
}

PruneOutcome lp_prune(const AffineForm& lower, std::span<const Interval> box,
                      const std::vector<LinearConstraint>& cons, double target) {
    PruneOutcome out;
    if (cons.empty()) {
        out.bound = affine_min_on_box(lower, box, &out.vertex);
        out.status = out.bound >= target ? PruneOutcome::Status::Proven
                                         : PruneOutcome::Status::Undecided;
        return out;
    }
    const int n = static_cast<int>(box.size());
    ExactLp lp;
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = rational_from(lower.slope[j]);
    for (const LinearConstraint& c : cons) {
        std::vector<Rational> row(n);
        for (int j = 0; j < n; ++j) row[j] = rational_from(c.coeffs[j]);
        lp.A.push_back(std::move(row));
        lp.b.push_back(rational_from(c.rhs));
    }
    for (int j = 0; j < n; ++j) {
        lp.lo.push_back(rational_from(box[j].lo()));
        lp.hi.push_back(rational_from(box[j].hi()));
    }
    ExactLpResult res = solve_exact_min(lp);
    if (res.status == ExactLpResult::Status::Infeasible) {
        out.status = PruneOutcome::Status::Infeasible;
        return out;
    }
    // Total = constant + sum slope_j (x_j - center_j), evaluated exactly.
    Rational total = rational_from(lower.constant) + res.objective;
    for (int j = 0; j < n; ++j)
        total -= rational_from(lower.slope[j]) * rational_from(lower.center[j]);
    out.bound = rational_to_double_down(total);
    out.vertex.resize(n);
    for (int j = 0; j < n; ++j) out.vertex[j] = rational_to_double_up(res.x[j]);
    out.status = out.bound >= target ? PruneOutcome::Status::Proven
                                     : PruneOutcome::Status::Undecided;
    return out;
}

namespace {

struct Search {
    const Expr& e;
    const BoxDomain& domain;
    double teff;
    const ProverOptions& opts;

    long leaves = 0;
    std::optional<FailureReport> failure;
    std::vector<double> best_point;
    double best_value = std::numeric_limits<double>::infinity();

    void sample(std::span<const Interval> box) {
        std::vector<double> m(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) m[i] = box[i].mid();
        double v = eval_point(e, m);
        if (std::isfinite(v) && v < best_value) {
            best_value = v;
            best_point = std::move(m);
        }
    }

    void fail(FailureReport::Reason reason, std::vector<Interval> box, Interval bound) {
        FailureReport f;
        f.reason = reason;
        f.box = std::move(box);
        f.bound_there = bound;
        f.best_point = best_point;
        f.best_value = best_value;
        f.leaves_explored = leaves;
        failure = std::move(f);
    }

    std::unique_ptr<CertNode> leaf_node(LeafWitness w) {
        ++leaves;
        auto node = std::make_unique<CertNode>();
        node->leaf = std::move(w);
        return node;
    }

    std::unique_ptr<CertNode> visit(std::vector<Interval> box, int depth) {
        if (failure) return nullptr;
        sample(box);

        if (!domain.constraints.empty() &&
            !constraints_feasible(box, domain.constraints)) {
            LeafWitness w;
            w.kind = LeafWitness::Kind::Infeasible;
            w.box = box;
            return leaf_node(std::move(w));
        }

        bool undefined = false;
        Interval bound = Interval::whole();
        try {
            bound = interval_eval(e, box);
        } catch (const eval_undefined&) {
            undefined = true;
        }
        if (!undefined) {
            if (bound.lo() >= teff) {
                LeafWitness w;
                w.kind = LeafWitness::Kind::IntervalBound;
                w.box = box;
                w.bound = bound.lo();
                return leaf_node(std::move(w));
            }
            if (bound.hi() < teff) {
                fail(FailureReport::Reason::Refuted, std::move(box), bound);
                return nullptr;
            }
            if (opts.use_lp) {
                if (auto enc = affine_enclosure(e, box)) {
                    PruneOutcome pr = lp_prune(enc->lower, box, domain.constraints, teff);
                    if (pr.status == PruneOutcome::Status::Proven) {
                        LeafWitness w;
                        w.kind = LeafWitness::Kind::LpBound;
                        w.box = box;
                        w.bound = pr.bound;
                        w.lower = enc->lower;
                        w.vertex = pr.vertex;
                        return leaf_node(std::move(w));
                    }
                    if (pr.status == PruneOutcome::Status::Infeasible) {
                        LeafWitness w;
                        w.kind = LeafWitness::Kind::Infeasible;
                        w.box = box;
                        return leaf_node(std::move(w));
                    }
                }
            }
        }

        if (depth >= opts.max_depth || leaves >= opts.max_leaves) {
            fail(undefined ? FailureReport::Reason::Undefined
                           : FailureReport::Reason::Exhausted,
                 std::move(box), bound);
            return nullptr;
        }

        int dim = 0;
        for (std::size_t i = 1; i < box.size(); ++i)
            if (box[i].width() > box[dim].width()) dim = static_cast<int>(i);
        double mid = box[dim].mid();
        if (!(box[dim].lo() < mid && mid < box[dim].hi())) {
            fail(undefined ? FailureReport::Reason::Undefined
                           : FailureReport::Reason::Exhausted,
                 std::move(box), bound);
            return nullptr;
        }

        auto node = std::make_unique<CertNode>();
        node->split_dim = dim;
        node->split_mid = mid;
        std::vector<Interval> lo_box = box, hi_box = box;
        lo_box[dim] = Interval(box[dim].lo(), mid);
        hi_box[dim] = Interval(mid, box[dim].hi());
        node->left = visit(std::move(lo_box), depth + 1);
        if (failure) return nullptr;
        node->right = visit(std::move(hi_box), depth + 1);
        if (failure) return nullptr;
        return node;
    }
};

} // namespace

ProveResult prove_lower_bound(const Expr& e, const BoxDomain& d, double target,
                              const ProverOptions& opts) {
    validate_domain(d, expr_dimension(e));
    if (!std::isfinite(target)) throw std::domain_error("target must be finite");
    Search search{e, d, target - opts.slack, opts};
    auto root = search.visit(d.bounds, 0);
    if (search.failure) return std::move(*search.failure);
    ProofCertificate cert;
    cert.expr_text = print_expr(e);
    cert.domain = d;
    cert.target = target;
    cert.slack = opts.slack;
    cert.used_lp = opts.use_lp;
    cert.leaves = search.leaves;
    cert.root = std::move(root);
    return cert;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

struct Replayer {
    const Expr& e;
    const ProofCertificate& cert;
    double teff;
    ReplayIssue* issue;
    long leaves_seen = 0;

    bool reject(const std::string& path, const std::string& what) {
        if (issue) *issue = {path, what};
        return false;
    }

    bool boxes_equal(const std::vector<Interval>& a, const std::vector<Interval>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return false;
        return true;
    }

    bool walk(const CertNode* node, std::vector<Interval> box, const std::string& path) {
        if (!node) return reject(path, "missing node");
        if (node->is_leaf()) {
            ++leaves_seen;
            const LeafWitness& w = *node->leaf;
            if (!boxes_equal(w.box, box))
                return reject(path, "leaf box does not match the split structure");
            switch (w.kind) {
                case LeafWitness::Kind::Infeasible: {
                    if (cert.domain.constraints.empty())
                        return reject(path, "infeasible leaf without constraints");
                    if (constraints_feasible(box, cert.domain.constraints))
                        return reject(path, "leaf claims infeasibility but the box is feasible");
                    return true;
                }
                case LeafWitness::Kind::IntervalBound: {
                    if (!(w.bound >= teff))
                        return reject(path, "leaf bound is below the target");
                    Interval fresh;
                    try {
                        fresh = interval_eval(e, box);
                    } catch (const eval_undefined&) {
                        return reject(path, "expression is undefined on the leaf box");
                    }
                    if (!(fresh.lo() >= w.bound))
                        return reject(path, "fresh interval bound does not support the claim");
                    return true;
                }
                case LeafWitness::Kind::LpBound: {
                    if (!(w.bound >= teff))
                        return reject(path, "leaf bound is below the target");
                    auto enc = affine_enclosure(e, box);
                    if (!enc)
                        return reject(path, "affine enclosure unavailable on the leaf box");
                    PruneOutcome pr = lp_prune(enc->lower, box, cert.domain.constraints, teff);
                    if (pr.status == PruneOutcome::Status::Infeasible)
                        return reject(path, "leaf kind mismatch: box is infeasible");
                    if (!(pr.bound >= w.bound))
                        return reject(path, "fresh LP bound does not support the claim");
                    return true;
                }
            }
            return reject(path, "unknown witness kind");
        }
        const int dim = node->split_dim;
        if (dim < 0 || dim >= static_cast<int>(box.size()))
            return reject(path, "split dimension out of range");
        if (!(box[dim].lo() < node->split_mid && node->split_mid < box[dim].hi()))
            return reject(path, "split midpoint is outside the box");
        std::vector<Interval> lo_box = box, hi_box = box;
        lo_box[dim] = Interval(box[dim].lo(), node->split_mid);
        hi_box[dim] = Interval(node->split_mid, box[dim].hi());
        return walk(node->left.get(), std::move(lo_box), path + ".L") &&
               walk(node->right.get(), std::move(hi_box), path + ".R");
    }
};

} // namespace

bool replay_certificate(const Expr& e, const ProofCertificate& cert, double target,
                        ReplayIssue* issue) {
    Replayer rp{e, cert, target - cert.slack, issue};
    try {
        validate_domain(cert.domain, expr_dimension(e));
    } catch (const std::domain_error& ex) {
        return rp.reject("root", ex.what());
    }
    if (!rp.walk(cert.root.get(), cert.domain.bounds, "root")) return false;
    if (rp.leaves_seen != cert.leaves)
        return rp.reject("root", "leaf count does not match the certificate header");
    return true;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json interval_to_json(const Interval& x) {
    return ordered_json{{"lo", format_double(x.lo())}, {"hi", format_double(x.hi())}};
}

Interval interval_from_json(const ordered_json& j) {
    if (j.is_array() && j.size() == 2) {
        double lo = j[0].is_string() ? parse_double(j[0].get<std::string>()) : j[0].get<double>();
        double hi = j[1].is_string() ? parse_double(j[1].get<std::string>()) : j[1].get<double>();
        return Interval(lo, hi);
    }
    if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
        throw std::runtime_error("expected an interval as {\"lo\", \"hi\"} or [lo, hi]");
    auto get = [](const ordered_json& v) {
        return v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>();
    };
    return Interval(get(j["lo"]), get(j["hi"]));
}

ordered_json box_to_json(const std::vector<Interval>& box) {
    ordered_json arr = ordered_json::array();
    for (const Interval& b : box) arr.push_back(interval_to_json(b));
    return arr;
}

std::vector<Interval> box_from_json(const ordered_json& j) {
    std::vector<Interval> out;
    for (const auto& b : j) out.push_back(interval_from_json(b));
    return out;
}

ordered_json doubles_to_json(const std::vector<double>& v) {
    ordered_json arr = ordered_json::array();
    for (double x : v) arr.push_back(format_double(x));
    return arr;
}

std::vector<double> doubles_from_json(const ordered_json& j) {
    std::vector<double> out;
    for (const auto& x : j)
        out.push_back(x.is_string() ? parse_double(x.get<std::string>()) : x.get<double>());
    return out;
}

ordered_json node_to_json(const CertNode& node) {
    ordered_json j;
    if (node.is_leaf()) {
        const LeafWitness& w = *node.leaf;
        ordered_json leaf;
        switch (w.kind) {
            case LeafWitness::Kind::IntervalBound: leaf["kind"] = "interval-bound"; break;
            case LeafWitness::Kind::LpBound: leaf["kind"] = "lp-bound"; break;
            case LeafWitness::Kind::Infeasible: leaf["kind"] = "infeasible"; break;
        }
        leaf["box"] = box_to_json(w.box);
        if (w.kind != LeafWitness::Kind::Infeasible) leaf["bound"] = format_double(w.bound);
        if (w.kind == LeafWitness::Kind::LpBound) {
            leaf["affine"] = ordered_json{{"constant", format_double(w.lower.constant)},
                                          {"slope", doubles_to_json(w.lower.slope)},
                                          {"center", doubles_to_json(w.lower.center)}};
            leaf["vertex"] = doubles_to_json(w.vertex);
        }
        j["leaf"] = std::move(leaf);
        return j;
    }
    j["split"] = ordered_json{{"dim", node.split_dim},
                              {"mid", format_double(node.split_mid)}};
    j["left"] = node_to_json(*node.left);
    j["right"] = node_to_json(*node.right);
    return j;
}

std::unique_ptr<CertNode> node_from_json(const ordered_json& j) {
    auto node = std::make_unique<CertNode>();
    if (j.contains("leaf")) {
        const auto& leaf = j["leaf"];
        LeafWitness w;
        std::string kind = leaf.at("kind").get<std::string>();
        if (kind == "interval-bound") w.kind = LeafWitness::Kind::IntervalBound;
        else if (kind == "lp-bound") w.kind = LeafWitness::Kind::LpBound;
        else if (kind == "infeasible") w.kind = LeafWitness::Kind::Infeasible;
        else throw std::runtime_error("unknown leaf kind: " + kind);
        w.box = box_from_json(leaf.at("box"));
        if (w.kind != LeafWitness::Kind::Infeasible)
            w.bound = parse_double(leaf.at("bound").get<std::string>());
        if (w.kind == LeafWitness::Kind::LpBound) {
            const auto& aff = leaf.at("affine");
            w.lower.constant = parse_double(aff.at("constant").get<std::string>());
            w.lower.slope = doubles_from_json(aff.at("slope"));
            w.lower.center = doubles_from_json(aff.at("center"));
            w.vertex = doubles_from_json(leaf.at("vertex"));
        }
        node->leaf = std::move(w);
        return node;
    }
    if (!j.contains("split"))
        throw std::runtime_error("certificate node is neither a split nor a leaf");
    node->split_dim = j["split"].at("dim").get<int>();
    node->split_mid = parse_double(j["split"].at("mid").get<std::string>());
    node->left = node_from_json(j.at("left"));
    node->right = node_from_json(j.at("right"));
    return node;
}

} // namespace

nlohmann::ordered_json domain_to_json(const BoxDomain& d) {
    ordered_json j;
    j["bounds"] = box_to_json(d.bounds);
    if (!d.constraints.empty()) {
        ordered_json cons = ordered_json::array();
        for (const LinearConstraint& c : d.constraints)
            cons.push_back(ordered_json{{"coeffs", doubles_to_json(c.coeffs)},
                                        {"rhs", format_double(c.rhs)}});
        j["constraints"] = std::move(cons);
    }
    return j;
}

BoxDomain domain_from_json(const nlohmann::ordered_json& j) {
    if (!j.is_object() || !j.contains("bounds"))
        throw std::runtime_error("domain document must contain \"bounds\"");
    BoxDomain d;
    d.bounds = box_from_json(j["bounds"]);
    if (j.contains("constraints")) {
        for (const auto& c : j["constraints"]) {
            LinearConstraint lc;
            lc.coeffs = doubles_from_json(c.at("coeffs"));
            lc.rhs = c["rhs"].is_string() ? parse_double(c["rhs"].get<std::string>())
                                          : c["rhs"].get<double>();
            d.constraints.push_back(std::move(lc));
        }
    }
    return d;
}

nlohmann::ordered_json certificate_to_json(const ProofCertificate& cert) {
    ordered_json j;
    j["format"] = "kepler-proof-certificate-v1";
    j["expr"] = cert.expr_text;
    j["dimension"] = cert.domain.bounds.size();
    j["target"] = format_double(cert.target);
    j["slack"] = format_double(cert.slack);
    j["use_lp"] = cert.used_lp;
    j["leaves"] = cert.leaves;
    j["domain"] = domain_to_json(cert.domain);
    j["tree"] = node_to_json(*cert.root);
    return j;
}

ProofCertificate certificate_from_json(const nlohmann::ordered_json& j) {
    if (j.value("format", "") != std::string("kepler-proof-certificate-v1"))
        throw std::runtime_error("not a proof certificate document");
    ProofCertificate cert;
    cert.expr_text = j.at("expr").get<std::string>();
    cert.target = parse_double(j.at("target").get<std::string>());
    cert.slack = parse_double(j.at("slack").get<std::string>());
    cert.used_lp = j.value("use_lp", true);
    cert.leaves = j.at("leaves").get<long>();
    cert.domain = domain_from_json(j.at("domain"));
    cert.root = node_from_json(j.at("tree"));
    return cert;
}

nlohmann::ordered_json failure_to_json(const FailureReport& f) {
    ordered_json j;
    j["format"] = "kepler-failure-report-v1";
    switch (f.reason) {
        case FailureReport::Reason::Exhausted: j["reason"] = "resource-exhausted"; break;
        case FailureReport::Reason::Refuted: j["reason"] = "interval-refuted"; break;
        case FailureReport::Reason::Undefined: j["reason"] = "undefined-on-box"; break;
    }
    j["note"] = "inconclusive: the candidate point is not a verified counterexample";
    j["box"] = box_to_json(f.box);
    j["bound_there"] = interval_to_json(f.bound_there);
    j["best_point"] = doubles_to_json(f.best_point);
    j["best_value"] = format_double(f.best_value);
    j["leaves_explored"] = f.leaves_explored;
    return j;
}

} // namespace kepler
