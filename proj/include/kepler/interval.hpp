#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <algorithm>

#include <Eigen/Core>

namespace kepler {

// Raised when a library invariant is violated (maps to CLI exit code 3).
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMaxD = std::numeric_limits<double>::max();

inline double next_down(double v) { return std::nextafter(v, -kInf); }
inline double next_up(double v) { return std::nextafter(v, kInf); }

// Directed-rounding endpoint helpers. Each computes the nearest-rounded
// result and the exact residual (TwoSum for +/-, fma for *, /, sqrt), then
// steps one ulp outward only when the rounded value lies on the wrong side.
// This keeps exact operations exact ([0,0]*[a,b] stays [0,0]) while
// guaranteeing containment, without touching the FPU rounding mode.

inline double add_down(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) {
        if (std::isnan(s)) return -kInf;
        return s < 0 ? s : kMaxD;   // overflow to +inf is not a lower bound
    }
    double bv = s - a;
    double err = (a - (s - bv)) + (b - bv);
    if (!std::isfinite(err)) return next_down(s);
    return err < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) {
        if (std::isnan(s)) return kInf;
        return s > 0 ? s : -kMaxD;
    }
    double bv = s - a;
    double err = (a - (s - bv)) + (b - bv);
    if (!std::isfinite(err)) return next_up(s);
    return err > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// Endpoint products use the convention 0 * x = 0 (x possibly infinite); the
// infinities that reach here only come from unbounded division results and
// stand for "arbitrarily large", never for an attained value.
inline double mul_down(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) {
        if (std::isnan(p)) return -kInf;
        return p < 0 ? p : kMaxD;
    }
    if (std::isinf(a) || std::isinf(b)) return p;
    double err = std::fma(a, b, -p);
    if (!std::isfinite(err)) return next_down(p);
    return err < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) {
        if (std::isnan(p)) return kInf;
        return p > 0 ? p : -kMaxD;
    }
    if (std::isinf(a) || std::isinf(b)) return p;
    double err = std::fma(a, b, -p);
    if (!std::isfinite(err)) return next_up(p);
    return err > 0 ? next_up(p) : p;
}

// b must not be zero. a/b = q - err/b with err = fma(q, b, -a) exact.
inline double div_down(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q)) {
        if (std::isnan(q)) return -kInf;
        return q < 0 ? q : kMaxD;
    }
    if (std::isinf(a) || std::isinf(b)) return q;
    double err = std::fma(q, b, -a);
    if (!std::isfinite(err)) return next_down(q);
    if (err != 0 && ((err > 0) == (b > 0))) return next_down(q);
    return q;
}

inline double div_up(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q)) {
        if (std::isnan(q)) return kInf;
        return q > 0 ? q : -kMaxD;
    }
    if (std::isinf(a) || std::isinf(b)) return q;
    double err = std::fma(q, b, -a);
    if (!std::isfinite(err)) return next_up(q);
    if (err != 0 && ((err > 0) != (b > 0))) return next_up(q);
    return q;
}

inline double sqrt_down(double x) {
    double s = std::sqrt(x);
    if (std::isinf(s)) return kMaxD;
    double err = std::fma(s, s, -x);
    return err > 0 ? next_down(s) : s;
}

inline double sqrt_up(double x) {
    double s = std::sqrt(x);
    if (std::isinf(s)) return s;
    double err = std::fma(s, s, -x);
    return err < 0 ? next_up(s) : s;
}

} // namespace detail

/// Closed interval [lo, hi] with guaranteed containment under arithmetic.
/// Invariants: lo <= hi, no NaN; lo < +inf and hi > -inf (no empty sets).
/// Infinite bounds mark a "possibly unbounded" value and arise only from
/// division by an interval containing zero.
class Interval {
public:
    Interval() : lo_(0.0), hi_(0.0) {}
    explicit Interval(double v) : lo_(v), hi_(v) { check(); }
    Interval(double lo, double hi) : lo_(lo), hi_(hi) { check(); }

    static Interval whole() { return Interval(-detail::kInf, detail::kInf); }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double mid() const {
        if (lo_ == -detail::kInf && hi_ == detail::kInf) return 0.0;
        if (lo_ == -detail::kInf) return hi_;
        if (hi_ == detail::kInf) return lo_;
        double m = 0.5 * (lo_ + hi_);
        if (!std::isfinite(m)) m = 0.5 * lo_ + 0.5 * hi_;
        return std::clamp(m, lo_, hi_);
    }
    double width() const { return hi_ - lo_; }
    double rad() const { return 0.5 * (hi_ - lo_); }
    /// Largest absolute value over the interval.
    double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

    bool bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }
    bool contains(double v) const { return lo_ <= v && v <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
    bool is_point() const { return lo_ == hi_; }

    bool operator==(const Interval& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }
    bool operator!=(const Interval& o) const { return !(*this == o); }

private:
    void check() const {
        if (std::isnan(lo_) || std::isnan(hi_) || lo_ > hi_ ||
            lo_ == detail::kInf || hi_ == -detail::kInf)
            throw internal_error("invalid interval bounds");
    }
    double lo_, hi_;
};

inline Interval operator+(const Interval& x, const Interval& y) {
    return Interval(detail::add_down(x.lo(), y.lo()), detail::add_up(x.hi(), y.hi()));
}

inline Interval operator-(const Interval& x, const Interval& y) {
    return Interval(detail::sub_down(x.lo(), y.hi()), detail::sub_up(x.hi(), y.lo()));
}

inline Interval operator-(const Interval& x) { return Interval(-x.hi(), -x.lo()); }
inline Interval operator+(const Interval& x) { return x; }

inline Interval operator*(const Interval& x, const Interval& y) {
    using namespace detail;
    double lo = std::min(std::min(mul_down(x.lo(), y.lo()), mul_down(x.lo(), y.hi())),
                         std::min(mul_down(x.hi(), y.lo()), mul_down(x.hi(), y.hi())));
    double hi = std::max(std::max(mul_up(x.lo(), y.lo()), mul_up(x.lo(), y.hi())),
                         std::max(mul_up(x.hi(), y.lo()), mul_up(x.hi(), y.hi())));
    return Interval(lo, hi);
}

/// Division. If y contains zero the result is a flagged unbounded interval
/// (one or both bounds infinite); it is never silently wrong. Callers that
/// need finite results must check bounded().
inline Interval operator/(const Interval& x, const Interval& y) {
    using namespace detail;
    if (y.contains_zero()) {
        if (y.lo() == 0.0 && y.hi() == 0.0) return Interval::whole();
        if (x.contains_zero()) return Interval::whole();
        if (x.lo() > 0.0) {
            if (y.hi() == 0.0) return Interval(-kInf, div_up(x.lo(), y.lo()));
            if (y.lo() == 0.0) return Interval(div_down(x.lo(), y.hi()), kInf);
            return Interval::whole();
        }
        // x.hi() < 0
        if (y.hi() == 0.0) return Interval(div_down(x.hi(), y.lo()), kInf);
        if (y.lo() == 0.0) return Interval(-kInf, div_up(x.hi(), y.hi()));
        return Interval::whole();
    }
    double lo = std::min(std::min(div_down(x.lo(), y.lo()), div_down(x.lo(), y.hi())),
                         std::min(div_down(x.hi(), y.lo()), div_down(x.hi(), y.hi())));
    double hi = std::max(std::max(div_up(x.lo(), y.lo()), div_up(x.lo(), y.hi())),
                         std::max(div_up(x.hi(), y.lo()), div_up(x.hi(), y.hi())));
    return Interval(lo, hi);
}

inline Interval& operator+=(Interval& x, const Interval& y) { return x = x + y; }
inline Interval& operator-=(Interval& x, const Interval& y) { return x = x - y; }
inline Interval& operator*=(Interval& x, const Interval& y) { return x = x * y; }
inline Interval& operator/=(Interval& x, const Interval& y) { return x = x / y; }

inline Interval operator+(const Interval& x, double y) { return x + Interval(y); }
inline Interval operator+(double x, const Interval& y) { return Interval(x) + y; }
inline Interval operator-(const Interval& x, double y) { return x - Interval(y); }
inline Interval operator-(double x, const Interval& y) { return Interval(x) - y; }
inline Interval operator*(const Interval& x, double y) { return x * Interval(y); }
inline Interval operator*(double x, const Interval& y) { return Interval(x) * y; }
inline Interval operator/(const Interval& x, double y) { return x / Interval(y); }
inline Interval operator/(double x, const Interval& y) { return Interval(x) / y; }

/// Square root over x intersected with [0, inf); lo clamps at 0.
/// Throws std::domain_error when the whole interval is negative.
inline Interval sqrt(const Interval& x) {
    if (x.hi() < 0.0) throw std::domain_error("sqrt of negative interval");
    double lo = x.lo() <= 0.0 ? 0.0 : std::max(0.0, detail::sqrt_down(x.lo()));
    return Interval(lo, detail::sqrt_up(x.hi()));
}

inline Interval square(const Interval& x) {
    using namespace detail;
    double alo = x.contains_zero() ? 0.0 : std::min(std::fabs(x.lo()), std::fabs(x.hi()));
    double ahi = x.mag();
    return Interval(mul_down(alo, alo), mul_up(ahi, ahi));
}

namespace detail {
// v >= 0, n >= 1: directed n-th power by repeated multiplication.
inline double pow_down_pos(double v, int n) {
    double r = v;
    for (int k = 1; k < n; ++k) r = mul_down(r, v);
    return r;
}
inline double pow_up_pos(double v, int n) {
    double r = v;
    for (int k = 1; k < n; ++k) r = mul_up(r, v);
    return r;
}
} // namespace detail

/// x^n for integer n. Negative n divides 1 by x^|n| and so may produce a
/// flagged unbounded result when x contains zero.
inline Interval pow_int(const Interval& x, int n) {
    using namespace detail;
    if (n == 0) return Interval(1.0);
    if (n < 0) return Interval(1.0) / pow_int(x, -n);
    if (n == 1) return x;
    if (n % 2 == 0) {
        double alo, ahi;
        if (x.lo() >= 0.0) { alo = x.lo(); ahi = x.hi(); }
        else if (x.hi() <= 0.0) { alo = -x.hi(); ahi = -x.lo(); }
        else { alo = 0.0; ahi = x.mag(); }
        return Interval(pow_down_pos(alo, n), pow_up_pos(ahi, n));
    }
    auto spow_down = [n](double v) { return v >= 0 ? pow_down_pos(v, n) : -pow_up_pos(-v, n); };
    auto spow_up = [n](double v) { return v >= 0 ? pow_up_pos(v, n) : -pow_down_pos(-v, n); };
    return Interval(spow_down(x.lo()), spow_up(x.hi()));
}

inline Interval min(const Interval& x, const Interval& y) {
    return Interval(std::min(x.lo(), y.lo()), std::min(x.hi(), y.hi()));
}

inline Interval max(const Interval& x, const Interval& y) {
    return Interval(std::max(x.lo(), y.lo()), std::max(x.hi(), y.hi()));
}

inline Interval abs(const Interval& x) {
    if (x.lo() >= 0.0) return x;
    if (x.hi() <= 0.0) return -x;
    return Interval(0.0, x.mag());
}

/// Tightest interval containing both arguments.
inline Interval hull(const Interval& x, const Interval& y) {
    return Interval(std::min(x.lo(), y.lo()), std::max(x.hi(), y.hi()));
}

inline bool intersects(const Interval& x, const Interval& y) {
    return x.lo() <= y.hi() && y.lo() <= x.hi();
}

/// Interval for sqrt(8); the upper edge of the admissible cutoff range.
inline Interval sqrt8() { return sqrt(Interval(8.0)); }

// Decimal serialization. print uses the shortest decimal form that parses
// back to the same double, so parse(print(x)) == x and the documented
// round-trip guarantee parse(print(x)) >= x holds with equality.
std::string format_double(double v);
double parse_double(const std::string& s);  // throws std::invalid_argument
std::string to_string(const Interval& x);   // "[lo, hi]" for diagnostics

} // namespace kepler

namespace Eigen {
template <>
struct NumTraits<kepler::Interval> : GenericNumTraits<kepler::Interval> {
    typedef kepler::Interval Real;
    typedef kepler::Interval NonInteger;
    typedef kepler::Interval Nested;
    typedef double Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 4,
        MulCost = 8
    };
    static inline Real epsilon() { return kepler::Interval(std::numeric_limits<double>::epsilon()); }
    static inline Real dummy_precision() { return kepler::Interval(1e-12); }
    static inline kepler::Interval highest() { return kepler::Interval(std::numeric_limits<double>::max()); }
    static inline kepler::Interval lowest() { return kepler::Interval(std::numeric_limits<double>::lowest()); }
    static inline int digits10() { return std::numeric_limits<double>::digits10; }
};
} // namespace Eigen
