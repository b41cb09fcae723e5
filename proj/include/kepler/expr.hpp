#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kepler/interval.hpp"

namespace kepler {

/// Expression parse failure with source location (1-based line and column).
struct parse_error : std::runtime_error {
    int line, col;
    parse_error(int l, int c, const std::string& msg)
        : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l), col(c) {}
};

/// Evaluation hit a point set where the expression is undefined over the
/// whole box (sqrt of a negative range, non-realizable edge lengths).
struct eval_undefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Affine-enclosure fallback: the expression is not differentiable (or has
/// unbounded slope) somewhere on the box; callers use interval bounds only.
struct enclosure_fallback : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExprOp {
    Var, Const, Add, Sub, Neg, Mul, Div, Sqrt, PowInt, Min, Max, CmVol
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression tree over variables x0..x{n-1}: field operations, integer
/// powers, sqrt, min/max, and the Cayley-Menger tetrahedron volume as a
/// named atom of six edge-length children.
struct Expr {
    ExprOp op;
    int var = -1;        // Var
    double value = 0;    // Const
    int exponent = 0;    // PowInt
    std::vector<ExprPtr> args;
};

ExprPtr make_var(int index);
ExprPtr make_const(double v);
ExprPtr make_node(ExprOp op, std::vector<ExprPtr> args, int exponent = 0);

/// Smallest dimension the expression is valid over (max variable index + 1).
int expr_dimension(const Expr& e);

/// Parse a prefix s-expression: literals, x<k> variables, and
/// (+ ...), (- a b), (- a), (neg a), (* ...), (/ a b), (sqrt a),
/// (pow a k), (min ...), (max ...), (cm-vol a b c d e f).
/// Throws parse_error with the offending location.
ExprPtr parse_expr(const std::string& src);

/// Canonical text form; parse_expr(print_expr(e)) reproduces the tree.
std::string print_expr(const Expr& e);

/// Interval enclosure of the range of e over the box. Division by an
/// interval containing zero propagates the flagged unbounded result;
/// expressions undefined over the whole box throw eval_undefined.
Interval interval_eval(const Expr& e, std::span<const Interval> box);

/// Plain floating evaluation at a point (no containment guarantee); used
/// for candidate sampling and failure reports only.
double eval_point(const Expr& e, std::span<const double> x);

/// Affine bound c + sum slope_i * (x_i - center_i), valid over one box.
struct AffineForm {
    double constant = 0;
    std::vector<double> slope;
    std::vector<double> center;
};

struct AffineEnclosure {
    AffineForm lower;  // e(x) >= lower(x) on the box
    AffineForm upper;  // e(x) <= upper(x) on the box
};

/// Mean-value enclosure around the box midpoint with interval forward-mode
/// derivatives. Returns nullopt when a non-differentiable construct forces
/// the fallback (sqrt or cm-vol not bounded away from the domain edge,
/// division by a range containing zero, min/max of overlapping ranges).
std::optional<AffineEnclosure> affine_enclosure(const Expr& e, std::span<const Interval> box);

/// Sound lower bound of an AffineForm over a box (interval evaluation), and
/// the minimizing vertex.
double affine_min_on_box(const AffineForm& f, std::span<const Interval> box,
                         std::vector<double>* vertex = nullptr);

} // namespace kepler
