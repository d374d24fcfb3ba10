#pragma once

// Real expressions: parsing, printing, natural interval extension and
// symbolic differentiation.
//
// Grammar
//   expr   := term (("+" | "-") term)*
//   term   := factor (("*" | "/") factor)*
//   factor := "-" factor | atom ("^" INT)?
//   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//           | "step" "(" lit "," lit "," lit ("," lit)? ";" expr ")"
//   lit    := "-"? NUMBER
// Builtins: exp, sin, cos, log, sqrt, step(c, a1, a2[, delta]; x).

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rigor/elementary.hpp"
#include "rigor/interval.hpp"
#include "rigor/rational.hpp"

namespace rigor {

enum class ExprKind { constant, variable, neg, add, sub, mul, div, pow, exp, sin, cos, log, sqrt, step };

// A decimal literal with its exact value and, when it fits, its tightest
// binary64 enclosure.
struct Literal {
    Rational value;
    std::string text;
    std::optional<Interval<F64>> f64;

    static Literal from_text(std::string_view text);
    static Literal from_value(const Rational& value);
};

class Expr {
public:
    struct Node;

    static Expr constant(const Literal& literal);
    static Expr variable(std::string name);
    static Expr unary(ExprKind kind, Expr arg);
    static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
    static Expr power(Expr base, unsigned exponent);
    static Expr step(Literal c, Literal a1, Literal a2, std::optional<Literal> delta, Expr arg);

    ExprKind kind() const;
    std::size_t arity() const;
    const Expr& arg(std::size_t i) const;
    const Literal& literal() const;
    const std::string& name() const;
    unsigned exponent() const;
    // c, a1, a2 and (optionally) delta of a step node.
    const std::vector<Literal>& step_literals() const;

    // Structural equality; literals compare by value.
    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Expr::Node {
    ExprKind kind;
    std::vector<Expr> args;
    std::vector<Literal> literals;
    std::string name;
    unsigned exponent = 0;
};

// Identifiers that are not builtins become variables.
Expr parse(std::string_view source);
// As above, but every variable must appear in params (UnknownIdentifier).
Expr parse(std::string_view source, const std::vector<std::string>& params);

// parse(print(e)) == e.
std::string print(const Expr& e);

// Exact derivative with light algebraic simplification (0/1 folding).
Expr differentiate(const Expr& e, std::string_view var);

std::set<std::string> free_variables(const Expr& e);

enum class PowMode {
    tight,  // parity-aware x^n ranges
    naive,  // x^n as repeated interval products
};

template <class B>
struct EvalContext {
    std::map<std::string, Interval<B>, std::less<>> bindings;
    typename B::scalar tol = B::div(B::from_int(1), B::from_int(1000000000), Rounding::down);
    PowMode pow_mode = PowMode::tight;
};

template <class B>
Interval<B> literal_enclosure(const Literal& lit) {
    if constexpr (B::exact) {
        return Interval<B>(lit.value);
    } else {
        if (!lit.f64) throw Overflow("literal " + lit.text + " is outside the binary64 range");
        return *lit.f64;
    }
}

namespace detail {

template <class B>
const Interval<B>& binding(const Expr& e, const EvalContext<B>& ctx) {
    auto it = ctx.bindings.find(e.name());
    if (it == ctx.bindings.end()) throw ValidationError("unbound variable '" + e.name() + "'");
    return it->second;
}

template <class B>
Interval<B> eval_node(const Expr& e, const EvalContext<B>& ctx);

// Calls fn on the value of e, reading variables in place instead of copying.
template <class B, class Fn>
Interval<B> with_value(const Expr& e, const EvalContext<B>& ctx, Fn&& fn) {
    if (e.kind() == ExprKind::variable) return fn(binding(e, ctx));
    return fn(eval_node(e, ctx));
}

template <class B>
Interval<B> eval_node(const Expr& e, const EvalContext<B>& ctx) {
    using I = Interval<B>;
    switch (e.kind()) {
        case ExprKind::constant:
            return literal_enclosure<B>(e.literal());
        case ExprKind::variable:
            return binding(e, ctx);
        case ExprKind::neg:
            return with_value(e.arg(0), ctx, [](const I& x) { return neg(x); });
        case ExprKind::add:
            return with_value(e.arg(0), ctx, [&](const I& x) {
                return with_value(e.arg(1), ctx, [&](const I& y) { return add(x, y); });
            });
        case ExprKind::sub:
            return with_value(e.arg(0), ctx, [&](const I& x) {
                return with_value(e.arg(1), ctx, [&](const I& y) { return sub(x, y); });
            });
        case ExprKind::mul:
            return with_value(e.arg(0), ctx, [&](const I& x) {
                return with_value(e.arg(1), ctx, [&](const I& y) { return mul(x, y); });
            });
        case ExprKind::div: {
            const Interval<B> num = eval_node(e.arg(0), ctx);
            const Interval<B> den = eval_node(e.arg(1), ctx);
            if (den.contains_zero()) throw DomainError("division by an interval containing zero in '" + print(e) + "'");
            return div(num, den);
        }
        case ExprKind::pow: {
            const Interval<B> base = eval_node(e.arg(0), ctx);
            return ctx.pow_mode == PowMode::tight ? pow(base, e.exponent()) : pow_naive(base, e.exponent());
        }
        case ExprKind::exp:
            return with_value(e.arg(0), ctx, [&](const I& x) { return exp_iv(x, ctx.tol); });
        case ExprKind::sin:
            return with_value(e.arg(0), ctx, [&](const I& x) { return sin_iv(x, ctx.tol); });
        case ExprKind::cos:
            return with_value(e.arg(0), ctx, [&](const I& x) { return cos_iv(x, ctx.tol); });
        case ExprKind::log: {
            const Interval<B> x = eval_node(e.arg(0), ctx);
            if (!(x.lo() > 0)) throw DomainError("log of an interval not strictly positive in '" + print(e) + "'");
            return log_iv(x, ctx.tol);
        }
        case ExprKind::sqrt: {
            const Interval<B> x = eval_node(e.arg(0), ctx);
            if (x.lo() < 0) throw DomainError("sqrt of an interval with negative part in '" + print(e) + "'");
            return sqrt_iv(x, ctx.tol);
        }
        case ExprKind::step: {
            const auto& lits = e.step_literals();
            typename B::scalar delta = B::from_int(0);
            if (lits.size() > 3) {
                delta = literal_enclosure<B>(lits[3]).lo();
            }
            return step_extension(literal_enclosure<B>(lits[0]), literal_enclosure<B>(lits[1]),
                                  literal_enclosure<B>(lits[2]), delta, eval_node(e.arg(0), ctx));
        }
    }
    throw ValidationError("unknown expression node");
}

}  // namespace detail

/// Natural interval extension: every variable replaced by its interval and
/// every operation by its interval counterpart. Throws DomainError naming the
/// offending subexpression when an operation is undefined on its arguments.
template <class B>
Interval<B> eval_iv(const Expr& e, const EvalContext<B>& ctx) {
    return detail::eval_node(e, ctx);
}

}  // namespace rigor
