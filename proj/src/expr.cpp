#include "kepler/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "kepler/geometry.hpp"

namespace kepler {

ExprPtr make_var(int index) {
    if (index < 0) throw std::domain_error("variable index must be nonnegative");
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Var;
    e->var = index;
    return e;
}

ExprPtr make_const(double v) {
    if (!std::isfinite(v)) throw std::domain_error("expression constants must be finite");
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Const;
    e->value = v;
    return e;
}

ExprPtr make_node(ExprOp op, std::vector<ExprPtr> args, int exponent) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->args = std::move(args);
    e->exponent = exponent;
    return e;
}

int expr_dimension(const Expr& e) {
    int dim = e.op == ExprOp::Var ? e.var + 1 : 0;
    for (const auto& a : e.args) dim = std::max(dim, expr_dimension(*a));
    return dim;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
    enum Kind { LParen, RParen, Symbol, Number, End } kind;
    std::string text;
    double number = 0;
    int line, col;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Token::End;
            return t;
        }
        char c = src_[pos_];
        if (c == '(') {
            advance();
            t.kind = Token::LParen;
            return t;
        }
        if (c == ')') {
            advance();
            t.kind = Token::RParen;
            return t;
        }
        std::size_t start = pos_;
        while (pos_ < src_.size() && !std::isspace((unsigned char)src_[pos_]) &&
               src_[pos_] != '(' && src_[pos_] != ')')
            advance();
        t.text = src_.substr(start, pos_ - start);
        double v;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec == std::errc() && res.ptr == t.text.data() + t.text.size()) {
            t.kind = Token::Number;
            t.number = v;
        } else {
            t.kind = Token::Symbol;
        }
        return t;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ';') {  // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace((unsigned char)c)) {
                advance();
            } else {
                break;
            }
        }
    }
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) { cur_ = lex_.next(); }

    ExprPtr parse() {
        ExprPtr e = expression();
        if (cur_.kind != Token::End)
            throw parse_error(cur_.line, cur_.col, "trailing input after expression");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error(cur_.line, cur_.col, msg);
    }

    void consume() { cur_ = lex_.next(); }

    ExprPtr expression() {
        if (cur_.kind == Token::Number) {
            double v = cur_.number;
            consume();
            return make_const(v);
        }
        if (cur_.kind == Token::Symbol) {
            ExprPtr v = variable(cur_.text);
            if (!v) fail("unknown symbol '" + cur_.text + "' (variables are x0, x1, ...)");
            consume();
            return v;
        }
        if (cur_.kind != Token::LParen) fail("expected an expression");
        consume();  // (
        if (cur_.kind != Token::Symbol) fail("expected an operator after '('");
        std::string op = cur_.text;
        int op_line = cur_.line, op_col = cur_.col;
        consume();

        std::vector<ExprPtr> args;
        std::optional<int> exponent;
        if (op == "pow") {
            args.push_back(expression());
            if (cur_.kind != Token::Number || cur_.number != std::floor(cur_.number))
                fail("pow expects an integer exponent");
            exponent = static_cast<int>(cur_.number);
            consume();
        } else {
            while (cur_.kind != Token::RParen && cur_.kind != Token::End)
                args.push_back(expression());
        }
        if (cur_.kind != Token::RParen) fail("expected ')'");
        consume();
        return build(op, std::move(args), exponent, op_line, op_col);
    }

    ExprPtr variable(const std::string& s) {
        if (s.size() < 2 || s[0] != 'x') return nullptr;
        int idx;
        auto res = std::from_chars(s.data() + 1, s.data() + s.size(), idx);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || idx < 0) return nullptr;
        return make_var(idx);
    }

    ExprPtr fold(ExprOp op, std::vector<ExprPtr> args) {
        ExprPtr acc = args[0];
        for (std::size_t i = 1; i < args.size(); ++i)
            acc = make_node(op, {acc, args[i]});
        return acc;
    }

    ExprPtr build(const std::string& op, std::vector<ExprPtr> args,
                  std::optional<int> exponent, int line, int col) {
        auto arity = [&](std::size_t lo, std::size_t hi, const char* what) {
            if (args.size() < lo || args.size() > hi)
                throw parse_error(line, col, std::string("'") + op + "' expects " + what);
        };
        if (op == "+") { arity(2, SIZE_MAX, "at least 2 arguments"); return fold(ExprOp::Add, std::move(args)); }
        if (op == "*") { arity(2, SIZE_MAX, "at least 2 arguments"); return fold(ExprOp::Mul, std::move(args)); }
        if (op == "-") {
            arity(1, 2, "1 or 2 arguments");
            if (args.size() == 1) return make_node(ExprOp::Neg, std::move(args));
            return make_node(ExprOp::Sub, std::move(args));
        }
        if (op == "neg") { arity(1, 1, "1 argument"); return make_node(ExprOp::Neg, std::move(args)); }
        if (op == "/") { arity(2, 2, "2 arguments"); return make_node(ExprOp::Div, std::move(args)); }
        if (op == "sqrt") { arity(1, 1, "1 argument"); return make_node(ExprOp::Sqrt, std::move(args)); }
        if (op == "pow") { arity(1, 1, "1 argument and an integer exponent"); return make_node(ExprOp::PowInt, std::move(args), *exponent); }
        if (op == "min") { arity(2, SIZE_MAX, "at least 2 arguments"); return fold(ExprOp::Min, std::move(args)); }
        if (op == "max") { arity(2, SIZE_MAX, "at least 2 arguments"); return fold(ExprOp::Max, std::move(args)); }
        if (op == "cm-vol") { arity(6, 6, "exactly 6 edge lengths"); return make_node(ExprOp::CmVol, std::move(args)); }
        throw parse_error(line, col, "unknown operator '" + op + "'");
    }

    Lexer lex_;
    Token cur_;
};

} // namespace

ExprPtr parse_expr(const std::string& src) {
    return Parser(src).parse();
}

std::string print_expr(const Expr& e) {
    switch (e.op) {
        case ExprOp::Var: return "x" + std::to_string(e.var);
        case ExprOp::Const: return format_double(e.value);
        case ExprOp::Add: return "(+ " + print_expr(*e.args[0]) + " " + print_expr(*e.args[1]) + ")";
        case ExprOp::Sub: return "(- " + print_expr(*e.args[0]) + " " + print_expr(*e.args[1]) + ")";
        case ExprOp::Neg: return "(neg " + print_expr(*e.args[0]) + ")";
        case ExprOp::Mul: return "(* " + print_expr(*e.args[0]) + " " + print_expr(*e.args[1]) + ")";
        case ExprOp::Div: return "(/ " + print_expr(*e.args[0]) + " " + print_expr(*e.args[1]) + ")";
        case ExprOp::Sqrt: return "(sqrt " + print_expr(*e.args[0]) + ")";
        case ExprOp::PowInt:
            return "(pow " + print_expr(*e.args[0]) + " " + std::to_string(e.exponent) + ")";
        case ExprOp::Min: return "(min " + print_expr(*e.args[0]) + " " + print_expr(*e.args[1]) + ")";
        case ExprOp::Max: return "(max " + print_expr(*e.args[0]) + " " + print_expr(*e.args[1]) + ")";
        case ExprOp::CmVol: {
            std::string s = "(cm-vol";
            for (const auto& a : e.args) s += " " + print_expr(*a);
            return s + ")";
        }
    }
    throw internal_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// Interval evaluation

Interval interval_eval(const Expr& e, std::span<const Interval> box) {
    switch (e.op) {
        case ExprOp::Var:
            if (e.var >= static_cast<int>(box.size()))
                throw std::domain_error("variable index exceeds domain dimension");
            return box[e.var];
        case ExprOp::Const: return Interval(e.value);
        case ExprOp::Add: return interval_eval(*e.args[0], box) + interval_eval(*e.args[1], box);
        case ExprOp::Sub: return interval_eval(*e.args[0], box) - interval_eval(*e.args[1], box);
        case ExprOp::Neg: return -interval_eval(*e.args[0], box);
        case ExprOp::Mul: return interval_eval(*e.args[0], box) * interval_eval(*e.args[1], box);
        case ExprOp::Div: return interval_eval(*e.args[0], box) / interval_eval(*e.args[1], box);
        case ExprOp::Sqrt: {
            Interval a = interval_eval(*e.args[0], box);
            if (a.hi() < 0.0) throw eval_undefined("sqrt of an entirely negative range");
            return sqrt(a);
        }
        case ExprOp::PowInt: return pow_int(interval_eval(*e.args[0], box), e.exponent);
        case ExprOp::Min: return min(interval_eval(*e.args[0], box), interval_eval(*e.args[1], box));
        case ExprOp::Max: return max(interval_eval(*e.args[0], box), interval_eval(*e.args[1], box));
        case ExprOp::CmVol: {
            std::array<Interval, 6> len;
            for (int k = 0; k < 6; ++k) len[k] = interval_eval(*e.args[k], box);
            try {
                return cayley_menger_volume(len);
            } catch (const std::domain_error& ex) {
                throw eval_undefined(ex.what());
            }
        }
    }
    throw internal_error("unreachable expression kind");
}

double eval_point(const Expr& e, std::span<const double> x) {
    switch (e.op) {
        case ExprOp::Var: return x[e.var];
        case ExprOp::Const: return e.value;
        case ExprOp::Add: return eval_point(*e.args[0], x) + eval_point(*e.args[1], x);
        case ExprOp::Sub: return eval_point(*e.args[0], x) - eval_point(*e.args[1], x);
        case ExprOp::Neg: return -eval_point(*e.args[0], x);
        case ExprOp::Mul: return eval_point(*e.args[0], x) * eval_point(*e.args[1], x);
        case ExprOp::Div: return eval_point(*e.args[0], x) / eval_point(*e.args[1], x);
        case ExprOp::Sqrt: return std::sqrt(eval_point(*e.args[0], x));
        case ExprOp::PowInt: return std::pow(eval_point(*e.args[0], x), e.exponent);
        case ExprOp::Min: return std::min(eval_point(*e.args[0], x), eval_point(*e.args[1], x));
        case ExprOp::Max: return std::max(eval_point(*e.args[0], x), eval_point(*e.args[1], x));
        case ExprOp::CmVol: {
            std::array<double, 6> len;
            for (int k = 0; k < 6; ++k) len[k] = eval_point(*e.args[k], x);
            double det = cayley_menger_det(len);
            return det <= 0 ? 0.0 : std::sqrt(det / 288.0);
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Forward-mode interval derivatives

namespace {

// Interval value plus interval partial derivatives. An empty gradient means
// a constant (identically zero derivative in every direction).
struct Dual {
    Interval v{0.0};
    std::vector<Interval> d;

    Dual() = default;
    Dual(double c) : v(c) {}
    explicit Dual(const Interval& val) : v(val) {}
};

std::vector<Interval> combine(const std::vector<Interval>& a, const std::vector<Interval>& b,
                              const auto& term) {
    std::size_t n = std::max(a.size(), b.size());
    std::vector<Interval> out(n, Interval(0.0));
    const Interval zero(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Interval& ai = i < a.size() ? a[i] : zero;
        const Interval& bi = i < b.size() ? b[i] : zero;
        out[i] = term(ai, bi);
    }
    return out;
}

Dual operator+(const Dual& x, const Dual& y) {
    Dual r(x.v + y.v);
    r.d = combine(x.d, y.d, [](const Interval& a, const Interval& b) { return a + b; });
    return r;
}

Dual operator-(const Dual& x, const Dual& y) {
    Dual r(x.v - y.v);
    r.d = combine(x.d, y.d, [](const Interval& a, const Interval& b) { return a - b; });
    return r;
}

Dual operator-(const Dual& x) {
    Dual r(-x.v);
    r.d.reserve(x.d.size());
    for (const Interval& g : x.d) r.d.push_back(-g);
    return r;
}

Dual operator*(const Dual& x, const Dual& y) {
    Dual r(x.v * y.v);
    r.d = combine(x.d, y.d, [&](const Interval& a, const Interval& b) {
        return a * y.v + x.v * b;
    });
    return r;
}

Dual operator/(const Dual& x, const Dual& y) {
    if (y.v.contains_zero())
        throw enclosure_fallback("division by a range containing zero");
    Dual r(x.v / y.v);
    Interval y2 = square(y.v);
    r.d = combine(x.d, y.d, [&](const Interval& a, const Interval& b) {
        return (a * y.v - x.v * b) / y2;
    });
    return r;
}

Dual dual_sqrt(const Dual& x) {
    if (!(x.v.lo() > 0.0))
        throw enclosure_fallback("sqrt not bounded away from zero");
    Interval s = sqrt(x.v);
    Dual r(s);
    Interval half_inv = Interval(0.5) / s;
    r.d.reserve(x.d.size());
    for (const Interval& g : x.d) r.d.push_back(g * half_inv);
    return r;
}

Dual dual_pow(const Dual& x, int n) {
    if (n < 0 && x.v.contains_zero())
        throw enclosure_fallback("negative power of a range containing zero");
    Dual r(pow_int(x.v, n));
    Interval factor = Interval(double(n)) * pow_int(x.v, n - 1);
    r.d.reserve(x.d.size());
    for (const Interval& g : x.d) r.d.push_back(g * factor);
    return r;
}

Dual dual_min(const Dual& x, const Dual& y) {
    if (x.v.hi() <= y.v.lo()) return x;
    if (y.v.hi() <= x.v.lo()) return y;
    throw enclosure_fallback("min of overlapping ranges is not differentiable");
}

Dual dual_max(const Dual& x, const Dual& y) {
    if (x.v.lo() >= y.v.hi()) return x;
    if (y.v.lo() >= x.v.hi()) return y;
    throw enclosure_fallback("max of overlapping ranges is not differentiable");
}

Dual dual_eval(const Expr& e, std::span<const Interval> box) {
    switch (e.op) {
        case ExprOp::Var: {
            Dual r(box[e.var]);
            r.d.assign(e.var + 1, Interval(0.0));
            r.d[e.var] = Interval(1.0);
            return r;
        }
        case ExprOp::Const: return Dual(e.value);
        case ExprOp::Add: return dual_eval(*e.args[0], box) + dual_eval(*e.args[1], box);
        case ExprOp::Sub: return dual_eval(*e.args[0], box) - dual_eval(*e.args[1], box);
        case ExprOp::Neg: return -dual_eval(*e.args[0], box);
        case ExprOp::Mul: return dual_eval(*e.args[0], box) * dual_eval(*e.args[1], box);
        case ExprOp::Div: return dual_eval(*e.args[0], box) / dual_eval(*e.args[1], box);
        case ExprOp::Sqrt: return dual_sqrt(dual_eval(*e.args[0], box));
        case ExprOp::PowInt: return dual_pow(dual_eval(*e.args[0], box), e.exponent);
        case ExprOp::Min: return dual_min(dual_eval(*e.args[0], box), dual_eval(*e.args[1], box));
        case ExprOp::Max: return dual_max(dual_eval(*e.args[0], box), dual_eval(*e.args[1], box));
        case ExprOp::CmVol: {
            std::array<Dual, 6> len;
            for (int k = 0; k < 6; ++k) len[k] = dual_eval(*e.args[k], box);
            Dual det = cayley_menger_det(len);
            return dual_sqrt(det / Dual(288.0));
        }
    }
    throw internal_error("unreachable expression kind");
}

} // namespace

std::optional<AffineEnclosure> affine_enclosure(const Expr& e, std::span<const Interval> box) {
    const std::size_t n = box.size();
    std::vector<Interval> mid_box(n);
    std::vector<double> mids(n);
    for (std::size_t i = 0; i < n; ++i) {
        mids[i] = box[i].mid();
        mid_box[i] = Interval(mids[i]);
    }

    Dual grad;
    Interval at_mid;
    try {
        grad = dual_eval(e, box);
        at_mid = interval_eval(e, mid_box);
    } catch (const enclosure_fallback&) {
        return std::nullopt;
    } catch (const eval_undefined&) {
        return std::nullopt;
    }
    for (const Interval& g : grad.d)
        if (!g.bounded()) return std::nullopt;

    // Mean-value form: e(x) in e(m) + sum G_i (x_i - m_i). Splitting each
    // G_i into the midpoint slope s_i plus a deviation D_i gives affine
    // bounds with shared slopes:
    //   e(x) in [K.lo, K.hi] + sum s_i (x_i - m_i),
    //   K = e(m) + sum D_i * [-r_i, r_i].
    AffineEnclosure enc;
    enc.lower.slope.resize(n);
    enc.lower.center = mids;
    Interval k = at_mid;
    for (std::size_t i = 0; i < n; ++i) {
        double s = i < grad.d.size() ? grad.d[i].mid() : 0.0;
        enc.lower.slope[i] = s;
        const Interval gi = i < grad.d.size() ? grad.d[i] : Interval(0.0);
        Interval dev = gi - Interval(s);
        double r_up = std::max(detail::sub_up(box[i].hi(), mids[i]),
                               detail::sub_up(mids[i], box[i].lo()));
        k += dev * Interval(-r_up, r_up);
    }
    enc.upper = enc.lower;
    enc.lower.constant = k.lo();
    enc.upper.constant = k.hi();
    return enc;
}

double affine_min_on_box(const AffineForm& f, std::span<const Interval> box,
                         std::vector<double>* vertex) {
    Interval total(f.constant);
    if (vertex) vertex->assign(box.size(), 0.0);
    for (std::size_t i = 0; i < box.size(); ++i) {
        double x = f.slope[i] >= 0 ? box[i].lo() : box[i].hi();
        if (vertex) (*vertex)[i] = x;
        total += Interval(f.slope[i]) * (Interval(x) - Interval(f.center[i]));
    }
    return total.lo();
}

} // namespace kepler
