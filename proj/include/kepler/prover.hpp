#pragma once

#include <memory>
#include <optional>
#include <variant>

#include <nlohmann/json.hpp>

#include "kepler/expr.hpp"

namespace kepler {

/// Linear constraint sum coeffs[i] * x_i <= rhs, cutting a simplex-product
/// region out of the box.
struct LinearConstraint {
    std::vector<double> coeffs;
    double rhs = 0;
};

/// Box domain with optional simplex constraints. The root domain must be
/// nonempty; subboxes produced during search may lose feasibility, which
/// the prover records as vacuously proven leaves.
struct BoxDomain {
    std::vector<Interval> bounds;
    std::vector<LinearConstraint> constraints;

    std::size_t dimension() const { return bounds.size(); }
};

/// Throws std::domain_error for dimension mismatches or an infeasible root.
void validate_domain(const BoxDomain& d, int expr_dimension);

/// Exact feasibility of box intersected with the constraints.
bool constraints_feasible(std::span<const Interval> box,
                          const std::vector<LinearConstraint>& cons);

struct ProverOptions {
    int max_depth = 48;
    long max_leaves = 100000;
    bool use_lp = true;
    double slack = 1e-9;  // leaves certify e >= target - slack
};

struct LeafWitness {
    enum class Kind { IntervalBound, LpBound, Infeasible };
    Kind kind = Kind::IntervalBound;
    std::vector<Interval> box;
    double bound = 0;            // certified lower bound of e on box
    AffineForm lower;            // LpBound only: the affine lower form used
    std::vector<double> vertex;  // LpBound only: minimizing vertex
};

/// Subdivision-tree node: either a split (dimension + midpoint, two
/// children exactly partitioning the parent) or a leaf witness.
struct CertNode {
    int split_dim = -1;
    double split_mid = 0;
    std::unique_ptr<CertNode> left, right;
    std::optional<LeafWitness> leaf;

    bool is_leaf() const { return leaf.has_value(); }
};

struct ProofCertificate {
    std::string expr_text;
    BoxDomain domain;
    double target = 0;
    double slack = 0;
    bool used_lp = true;
    long leaves = 0;
    std::unique_ptr<CertNode> root;
};

struct FailureReport {
    enum class Reason { Exhausted, Refuted, Undefined };
    Reason reason = Reason::Exhausted;
    std::vector<Interval> box;        // deepest undecided (or refuting) box
    Interval bound_there{0.0};
    std::vector<double> best_point;   // candidate minimizer; not a disproof
    double best_value = 0;
    long leaves_explored = 0;
};

using ProveResult = std::variant<ProofCertificate, FailureReport>;

inline bool proven(const ProveResult& r) {
    return std::holds_alternative<ProofCertificate>(r);
}

/// Branch-and-bound proof of e >= target - slack over the domain. Splits
/// the widest dimension (ties to the lowest index), prunes with interval
/// bounds and, when enabled, affine-enclosure linear programs. Fully
/// deterministic for fixed inputs and options.
ProveResult prove_lower_bound(const Expr& e, const BoxDomain& d, double target,
                              const ProverOptions& opts = {});

/// LP pruning step: minimizes a sound affine lower form over box and
/// constraints. Pure boxes evaluate at the sign-determined vertex; with
/// constraints an exact rational simplex runs. `bound` is a sound double
/// lower bound of the affine form (hence of e).
struct PruneOutcome {
    enum class Status { Proven, Undecided, Infeasible };
    Status status = Status::Undecided;
    double bound = 0;
    std::vector<double> vertex;
};

PruneOutcome lp_prune(const AffineForm& lower, std::span<const Interval> box,
                      const std::vector<LinearConstraint>& cons, double target);

struct ReplayIssue {
    std::string path;  // e.g. "root.L.R"
    std::string what;
};

/// Re-verify every leaf with fresh interval/LP evaluation and check the
/// split structure; no search. True iff the certificate proves
/// e >= target - slack. On failure `issue` (if given) names the leaf path.
bool replay_certificate(const Expr& e, const ProofCertificate& cert, double target,
                        ReplayIssue* issue = nullptr);

// Serialization: structured JSON documents with decimal-string bounds; the
// replay tool consumes exactly this format. Parsing re-validates structure.
nlohmann::ordered_json certificate_to_json(const ProofCertificate& cert);
ProofCertificate certificate_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json failure_to_json(const FailureReport& f);

nlohmann::ordered_json domain_to_json(const BoxDomain& d);
BoxDomain domain_from_json(const nlohmann::ordered_json& j);

} // namespace kepler
