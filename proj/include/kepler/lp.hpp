#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kepler/interval.hpp"

namespace kepler {

using Rational = boost::multiprecision::cpp_rational;

/// minimize c.x subject to A x <= b and lo <= x <= hi (all bounds finite).
/// Solved exactly over rationals with Bland's rule, so pivoting never
/// cycles and feasibility answers are decisions, not estimates.
struct ExactLp {
    std::vector<Rational> c;
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<Rational> lo, hi;
};

struct ExactLpResult {
    enum class Status { Optimal, Infeasible } status;
    Rational objective;
    std::vector<Rational> x;
};

ExactLpResult solve_exact_min(const ExactLp& lp);

/// Exact rational from a double (every finite double is rational).
Rational rational_from(double v);

/// Largest double <= r (sound lower rounding) and smallest double >= r.
double rational_to_double_down(const Rational& r);
double rational_to_double_up(const Rational& r);

} // namespace kepler
