#include "kepler/lp.hpp"

#include <stdexcept>

namespace kepler {

Rational rational_from(double v) {
    if (!std::isfinite(v)) throw std::domain_error("LP data must be finite");
    return Rational(v);
}

double rational_to_double_down(const Rational& r) {
    double d = r.convert_to<double>();
    while (Rational(d) > r) d = detail::next_down(d);
    return d;
}

double rational_to_double_up(const Rational& r) {
    double d = r.convert_to<double>();
    while (Rational(d) < r) d = detail::next_up(d);
    return d;
}

namespace {

// Dense full-tableau simplex in canonical form, exact rationals, Bland's
// rule for both entering and leaving choices.
struct Tableau {
    int rows = 0, cols = 0;                 // cols excludes the rhs
    std::vector<std::vector<Rational>> a;   // rows x cols
    std::vector<Rational> rhs;              // rows
    std::vector<Rational> cost;             // reduced-cost row
    Rational cost_rhs = 0;                  // negative of current objective
    std::vector<int> basis;                 // basic column per row

    void pivot(int r, int c) {
        Rational piv = a[r][c];
        for (int j = 0; j < cols; ++j) a[r][j] /= piv;
        rhs[r] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (int j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            rhs[i] -= f * rhs[r];
        }
        if (cost[c] != 0) {
            Rational f = cost[c];
            for (int j = 0; j < cols; ++j) cost[j] -= f * a[r][j];
            cost_rhs -= f * rhs[r];
        }
        basis[r] = c;
    }

    // Returns true at optimality, false when unbounded below.
    bool iterate(int allowed_cols) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < allowed_cols; ++j) {
                if (cost[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            Rational best_ratio = 0;
            for (int i = 0; i < rows; ++i) {
                if (a[i][enter] <= 0) continue;
                Rational ratio = rhs[i] / a[i][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }
};

} // namespace

ExactLpResult solve_exact_min(const ExactLp& lp) {
    const int n = static_cast<int>(lp.c.size());
    const int m_user = static_cast<int>(lp.A.size());
    for (int i = 0; i < n; ++i)
        if (lp.lo[i] > lp.hi[i]) return {ExactLpResult::Status::Infeasible, 0, {}};

    // Shift to z = x - lo >= 0 and fold upper bounds in as rows.
    struct Row {
        std::vector<Rational> a;
        Rational b;
    };
    std::vector<Row> rows;
    for (int i = 0; i < m_user; ++i) {
        Row r;
        r.a = lp.A[i];
        r.b = lp.b[i];
        for (int j = 0; j < n; ++j) r.b -= lp.A[i][j] * lp.lo[j];
        rows.push_back(std::move(r));
    }
    for (int j = 0; j < n; ++j) {
        Row r;
        r.a.assign(n, 0);
        r.a[j] = 1;
        r.b = lp.hi[j] - lp.lo[j];
        rows.push_back(std::move(r));
    }
    const int m = static_cast<int>(rows.size());

    // Columns: z (n) | slack (m) | artificial (one per negative-rhs row).
    int n_art = 0;
    for (const Row& r : rows)
        if (r.b < 0) ++n_art;
    Tableau t;
    t.rows = m;
    t.cols = n + m + n_art;
    t.a.assign(m, std::vector<Rational>(t.cols, 0));
    t.rhs.assign(m, 0);
    t.basis.assign(m, -1);
    int art = n + m;
    for (int i = 0; i < m; ++i) {
        bool flip = rows[i].b < 0;
        for (int j = 0; j < n; ++j) t.a[i][j] = flip ? -rows[i].a[j] : rows[i].a[j];
        t.a[i][n + i] = flip ? -1 : 1;
        t.rhs[i] = flip ? -rows[i].b : rows[i].b;
        if (flip) {
            t.a[i][art] = 1;
            t.basis[i] = art;
            ++art;
        } else {
            t.basis[i] = n + i;
        }
    }

    // Phase 1: minimize the sum of artificials.
    if (n_art > 0) {
        t.cost.assign(t.cols, 0);
        for (int j = n + m; j < t.cols; ++j) t.cost[j] = 1;
        t.cost_rhs = 0;
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < n + m) continue;
            for (int j = 0; j < t.cols; ++j) t.cost[j] -= t.a[i][j];
            t.cost_rhs -= t.rhs[i];
        }
        if (!t.iterate(t.cols)) throw internal_error("phase-1 LP reported unbounded");
        if (t.cost_rhs != 0) return {ExactLpResult::Status::Infeasible, 0, {}};
        // Drive zero-valued artificials out of the basis where possible.
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < n + m) continue;
            int j = 0;
            for (; j < n + m; ++j)
                if (t.a[i][j] != 0) break;
            if (j < n + m) t.pivot(i, j);
        }
    }

    // Phase 2 over the real objective; artificial columns stay out.
    t.cost.assign(t.cols, 0);
    for (int j = 0; j < n; ++j) t.cost[j] = lp.c[j];
    t.cost_rhs = 0;
    for (int i = 0; i < m; ++i) {
        int bj = t.basis[i];
        if (bj >= n + m) continue;  // redundant row kept with zero artificial
        if (t.cost[bj] == 0) continue;
        Rational f = t.cost[bj];
        for (int j = 0; j < t.cols; ++j) t.cost[j] -= f * t.a[i][j];
        t.cost_rhs -= f * t.rhs[i];
    }
    if (!t.iterate(n + m)) throw internal_error("box-bounded LP reported unbounded");

    ExactLpResult out;
    out.status = ExactLpResult::Status::Optimal;
    out.x.assign(n, 0);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) out.x[t.basis[i]] = t.rhs[i];
    out.objective = 0;
    for (int j = 0; j < n; ++j) {
        out.x[j] += lp.lo[j];
        out.objective += lp.c[j] * out.x[j];
    }
    return out;
}

} // namespace kepler
