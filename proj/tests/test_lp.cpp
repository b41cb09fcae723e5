#include <doctest.h>

#include "kepler/lp.hpp"

using namespace kepler;

namespace {

ExactLp make_lp(std::vector<double> c, std::vector<std::vector<double>> A,
                std::vector<double> b, std::vector<double> lo, std::vector<double> hi) {
    ExactLp lp;
    for (double v : c) lp.c.push_back(rational_from(v));
    for (const auto& row : A) {
        std::vector<Rational> r;
        for (double v : row) r.push_back(rational_from(v));
        lp.A.push_back(std::move(r));
    }
    for (double v : b) lp.b.push_back(rational_from(v));
    for (double v : lo) lp.lo.push_back(rational_from(v));
    for (double v : hi) lp.hi.push_back(rational_from(v));
    return lp;
}

} // namespace

TEST_CASE("doubles convert to rationals exactly") {
    Rational r = rational_from(0.1);
    CHECK(r * 10 != Rational(1));  // 0.1 is not exactly one tenth
    CHECK(rational_from(0.5) * 2 == Rational(1));
    CHECK(rational_from(-2.51) == Rational(-2.51));
}

TEST_CASE("directed rational-to-double rounding brackets the value") {
    Rational third(1, 3);
    double down = rational_to_double_down(third);
    double up = rational_to_double_up(third);
    CHECK(Rational(down) <= third);
    CHECK(Rational(up) >= third);
    CHECK(up - down <= 1e-16);
    CHECK(rational_to_double_down(Rational(2)) == 2.0);
    CHECK(rational_to_double_up(Rational(2)) == 2.0);
}

TEST_CASE("box-only minimum sits at a vertex") {
    // min x0 - 2 x1 over [0,1] x [0,2]
    auto lp = make_lp({1, -2}, {}, {}, {0, 0}, {1, 2});
    auto res = solve_exact_min(lp);
    REQUIRE(res.status == ExactLpResult::Status::Optimal);
    CHECK(res.objective == Rational(-4));
    CHECK(res.x[0] == 0);
    CHECK(res.x[1] == 2);
}

TEST_CASE("constraints bind the optimum") {
    // min -x0 - x1 with x0 + x1 <= 1.5 on [0,1]^2: optimum -1.5 on the cut.
    auto lp = make_lp({-1, -1}, {{1, 1}}, {1.5}, {0, 0}, {1, 1});
    auto res = solve_exact_min(lp);
    REQUIRE(res.status == ExactLpResult::Status::Optimal);
    CHECK(res.objective == rational_from(-1.5));
    CHECK(res.x[0] + res.x[1] == rational_from(1.5));
}

TEST_CASE("negative right-hand sides route through phase one") {
    // x0 + x1 >= 1 written as -x0 - x1 <= -1, minimize x0 + x1 on [0,2]^2.
    auto lp = make_lp({1, 1}, {{-1, -1}}, {-1}, {0, 0}, {2, 2});
    auto res = solve_exact_min(lp);
    REQUIRE(res.status == ExactLpResult::Status::Optimal);
    CHECK(res.objective == Rational(1));
}

TEST_CASE("infeasible constraint systems are detected") {
    // x0 + x1 <= 3 conflicts with x0, x1 in [2, 2.5].
    auto lp = make_lp({0, 0}, {{1, 1}}, {3}, {2, 2}, {2.5, 2.5});
    CHECK(solve_exact_min(lp).status == ExactLpResult::Status::Infeasible);

    // Contradictory pair of cuts.
    auto lp2 = make_lp({1}, {{1}, {-1}}, {1, -2}, {0}, {5});
    CHECK(solve_exact_min(lp2).status == ExactLpResult::Status::Infeasible);

    // Empty box.
    auto lp3 = make_lp({1}, {}, {}, {2}, {1});
    CHECK(solve_exact_min(lp3).status == ExactLpResult::Status::Infeasible);
}

TEST_CASE("exactness: no drift on adversarial coefficients") {
    // min x0 with 3 * x0 >= 1  ->  -3 x0 <= -1 on [0, 1]; optimum exactly 1/3.
    auto lp = make_lp({1}, {{-3}}, {-1}, {0}, {1});
    auto res = solve_exact_min(lp);
    REQUIRE(res.status == ExactLpResult::Status::Optimal);
    CHECK(res.objective == Rational(1, 3));
    CHECK(rational_to_double_down(res.objective) <= 1.0 / 3.0);
}

TEST_CASE("degenerate redundant constraints do not cycle") {
    auto lp = make_lp({-1, -1},
                      {{1, 1}, {1, 1}, {2, 2}, {1, 0}},
                      {1, 1, 2, 1},
                      {0, 0}, {3, 3});
    auto res = solve_exact_min(lp);
    REQUIRE(res.status == ExactLpResult::Status::Optimal);
    CHECK(res.objective == Rational(-1));
}
