#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rigor/algorithms.hpp"
#include "support.hpp"

using namespace rigor;
using support::Exact;
using support::Gen;

namespace {

template <class B>
Interval<B> iv(long lo, long hi) {
    return Interval<B>(B::from_int(lo), B::from_int(hi));
}

Interval<Rat> ivq(const Rational& lo, const Rational& hi) { return Interval<Rat>(lo, hi); }

template <class B>
typename B::scalar sc(const Rational& q) {
    return B::from_rational(q, Rounding::down);
}

Expr x() { return Expr::variable("x"); }
// Any rational as an expression: |p| / q, negated when needed.
Expr lit(const Rational& q) {
    const Expr num = Expr::constant(Literal::from_value(Rational(abs(q.get_num()))));
    Expr e = q.get_den() == 1 ? num : Expr::binary(ExprKind::div, num, Expr::constant(Literal::from_value(Rational(q.get_den()))));
    return q < 0 ? Expr::unary(ExprKind::neg, e) : e;
}

// Polynomial in Horner form with the given coefficients (lowest degree first).
Expr horner(const std::vector<Rational>& c) {
    Expr e = lit(c.back());
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        e = Expr::binary(ExprKind::add, Expr::binary(ExprKind::mul, e, x()), lit(c[i]));
    }
    return e;
}

Rational poly_value(const std::vector<Rational>& c, const Rational& t) {
    Rational v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
}

Rational poly_integral(const std::vector<Rational>& c, const Rational& a, const Rational& b) {
    Rational total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const long k = static_cast<long>(i) + 1;
        total += c[i] * (support::power(b, k) - support::power(a, k)) / k;
    }
    return total;
}

// sqrt(2) bracketed from a double guess.
Exact sqrt2() {
    Rational s(std::sqrt(2.0));
    if (s * s < 2) return {s, 2 / s};
    return {2 / s, s};
}

}  // namespace

// ---- BSA ----------------------------------------------------------------------

TEST_CASE_TEMPLATE("constant function needs one evaluation", B, F64, Rat) {
    int calls = 0;
    const IntervalFunction<B> f = [&](const Interval<B>&) {
        ++calls;
        return iv<B>(3, 3);
    };
    const auto r = bsa_range(f, iv<B>(-5, 7), sc<B>(Rational(1, 100)), 1000);
    CHECK(r.status == BsaStatus::success);
    CHECK(*r.range == iv<B>(3, 3));
    CHECK(calls == 1);
    CHECK(r.bisections == 0);
    CHECK(r.covering.pieces.size() == 1);
}

TEST_CASE_TEMPLATE("x squared on [0,1] with eps 1/4", B, F64, Rat) {
    const auto r = bsa_range(extension<B>(parse("x^2"), "x"), iv<B>(0, 1), sc<B>(Rational(1, 4)), 1000);
    REQUIRE(r.status == BsaStatus::success);
    CHECK(subset(iv<B>(0, 1), *r.range));
    CHECK(subset(*r.range, Interval<B>(sc<B>(Rational(-1, 4)), sc<B>(Rational(5, 4)))));
    CHECK(is_valid_covering(r.covering));
}

TEST_CASE("sandwich for exp(-x) on [0,10] on rationals") {
    const Rational eps(1, 1000);
    const auto r = bsa_range(extension<Rat>(parse("exp(-x)"), "x"), iv<Rat>(0, 10), eps, 100000);
    REQUIRE(r.status == BsaStatus::success);
    const Exact lower = support::exp_bounds(Rational(-10), 120);
    CHECK(r.range->lo() <= lower.lo);
    CHECK(r.range->hi() >= 1);
    CHECK(r.range->lo() >= lower.hi - eps);
    CHECK(r.range->hi() <= 1 + eps);
    CHECK(is_valid_covering(r.covering));
}

TEST_CASE_TEMPLATE("sandwich for x squared on a symmetric domain", B, F64, Rat) {
    const Rational eps(1, 1000);
    const auto r = bsa_range(extension<B>(parse("x^2"), "x"), iv<B>(-3, 3), sc<B>(eps), 100000);
    REQUIRE(r.status == BsaStatus::success);
    const Rational lo = support::lo_of(*r.range);
    const Rational hi = support::hi_of(*r.range);
    CHECK(lo <= 0);
    CHECK(hi >= 9);
    CHECK(lo >= -eps);
    CHECK(hi <= 9 + eps);
}

TEST_CASE("sandwich for log on [1,5] on rationals") {
    const Rational eps(1, 10000);
    const auto r = bsa_range(extension<Rat>(parse("log(x)"), "x"), iv<Rat>(1, 5), eps, 100000);
    REQUIRE(r.status == BsaStatus::success);
    CHECK(r.range->lo() <= 0);
    CHECK(r.range->lo() >= -eps);
    // log 5 <= hi <= log 5 + eps, checked through exp
    CHECK(support::exp_bounds(r.range->hi(), 80).lo >= 5);
    CHECK(support::exp_bounds(r.range->hi() - eps, 80).hi <= 5);
}

TEST_CASE("step extension with slack fails on binary64") {
    const auto f = extension<F64>(parse("step(0.5, 2, 1, 0.000000000001; x)"), "x");
    const auto r = bsa_range(f, iv<F64>(0, 1), 0.5, 1000000);
    CHECK(r.status == BsaStatus::failure);
    CHECK_FALSE(r.range.has_value());
    CHECK(r.bisections < 1000000);
}

TEST_CASE("step extension without slack fails at the discontinuity on binary64") {
    const auto f = extension<F64>(parse("step(0.5, 2, 1; x)"), "x");
    const auto r = bsa_range(f, iv<F64>(0, 1), 0.5, 1000000);
    CHECK(r.status == BsaStatus::failure);
    CHECK(r.bisections < 200);
}

TEST_CASE("step extension on a domain that avoids c succeeds") {
    const auto f = extension<F64>(parse("step(0.5, 2, 1; x)"), "x");
    const auto r = bsa_range(f, iv<F64>(1, 2), 0.5, 1000);
    REQUIRE(r.status == BsaStatus::success);
    CHECK(*r.range == iv<F64>(2, 2));
}

TEST_CASE_TEMPLATE("budget is a distinct outcome", B, F64, Rat) {
    const auto r = bsa_range(extension<B>(parse("exp(-x)"), "x"), iv<B>(0, 10), sc<B>(Rational(1, 1000000)), 10);
    CHECK(r.status == BsaStatus::budget);
    CHECK(r.bisections == 10);
    CHECK_FALSE(r.range.has_value());
}

TEST_CASE("eps must be positive") {
    CHECK_THROWS_AS(bsa_range(extension<Rat>(parse("x"), "x"), iv<Rat>(0, 1), Rational(0), 10), DomainError);
}

TEST_CASE("domain errors on pieces keep them bad") {
    // 1/x is undefined on [-1,1] as a whole but fine away from 0, and the
    // piece touching 0 can never be good
    const auto r = bsa_range(extension<F64>(parse("1/x"), "x"), iv<F64>(-1, 1), 1.0, 5000);
    CHECK(r.status != BsaStatus::success);
}

TEST_CASE_TEMPLATE("coverings from random expressions are valid", B, F64, Rat) {
    const char* sources[] = {"sin(3*x) + x", "x^3 - x", "exp(x) * cos(x)", "sqrt(x + 2)", "1/(x + 3)"};
    for (const char* s : sources) {
        const auto r = bsa_range(extension<B>(parse(s), "x"), iv<B>(-1, 1), sc<B>(Rational(1, 100)), 100000);
        INFO(s);
        REQUIRE(r.status == BsaStatus::success);
        CHECK(is_valid_covering(r.covering));
        const auto trimmed = without_degenerate_pieces(r.covering);
        CHECK(is_valid_covering(trimmed));
        // the range is the hull of the piece enclosures
        Interval<B> h = r.covering.pieces.front().enclosure;
        for (const auto& p : r.covering.pieces) h = hull(h, p.enclosure);
        CHECK(h == *r.range);
        // pieces come back ordered by left endpoint
        for (std::size_t i = 1; i < r.covering.pieces.size(); ++i) {
            CHECK_FALSE(r.covering.pieces[i].piece.lo() < r.covering.pieces[i - 1].piece.lo());
        }
    }
}

TEST_CASE("degenerate pieces can be dropped without losing coverage") {
    Covering<Rat> cov{{}, Rational(1), iv<Rat>(0, 2)};
    cov.pieces.push_back({iv<Rat>(0, 1), iv<Rat>(0, 1)});
    cov.pieces.push_back({iv<Rat>(1, 1), iv<Rat>(1, 1)});
    cov.pieces.push_back({iv<Rat>(1, 2), iv<Rat>(1, 2)});
    CHECK(is_valid_covering(cov));
    const auto trimmed = without_degenerate_pieces(cov);
    CHECK(trimmed.pieces.size() == 2);
    CHECK(is_valid_covering(trimmed));
    cov.pieces.pop_back();
    CHECK_FALSE(is_valid_covering(cov));
}

TEST_CASE("coverings with a gap or a wide enclosure are invalid") {
    Covering<Rat> gap{{}, Rational(1), iv<Rat>(0, 3)};
    gap.pieces.push_back({iv<Rat>(0, 1), iv<Rat>(0, 0)});
    gap.pieces.push_back({iv<Rat>(2, 3), iv<Rat>(0, 0)});
    CHECK_FALSE(is_valid_covering(gap));
    Covering<Rat> wide{{}, Rational(1), iv<Rat>(0, 1)};
    wide.pieces.push_back({iv<Rat>(0, 1), iv<Rat>(0, 2)});
    CHECK_FALSE(is_valid_covering(wide));
}

// ---- modulus --------------------------------------------------------------------

TEST_CASE("modulus of the identity on [0,1]") {
    const auto r = bsa_range(extension<Rat>(parse("x"), "x"), iv<Rat>(0, 1), Rational(1, 10), 1000);
    REQUIRE(r.status == BsaStatus::success);
    const auto m = modulus_estimate(r.covering);
    CHECK(m.delta > 0);
    CHECK(m.bound == Rational(1, 5));
    Gen g(401);
    for (int i = 0; i < 2000; ++i) {
        const Rational a = g.point_in(iv<Rat>(0, 1));
        Rational b = a + (Rational(g.integer(-1000, 1000), 1000)) * m.delta;
        if (b < 0 || b > 1) continue;
        REQUIRE(abs(a - b) <= m.bound);
    }
}

TEST_CASE("modulus of a single piece and of a constant") {
    Covering<Rat> one{{}, Rational(1, 2), iv<Rat>(0, 3)};
    one.pieces.push_back({iv<Rat>(0, 3), iv<Rat>(1, 1)});
    CHECK(modulus_estimate(one).delta == 3);
    Covering<Rat> flat{{}, Rational(0), iv<Rat>(0, 2)};
    flat.pieces.push_back({iv<Rat>(0, 1), iv<Rat>(4, 4)});
    flat.pieces.push_back({iv<Rat>(1, 2), iv<Rat>(4, 4)});
    const auto m = modulus_estimate(flat);
    CHECK(m.bound == 0);
    CHECK(m.delta == 1);
    Covering<Rat> points{{}, Rational(1), iv<Rat>(1, 1)};
    points.pieces.push_back({iv<Rat>(1, 1), iv<Rat>(0, 0)});
    CHECK_THROWS_AS(modulus_estimate(points), EmptyCovering);
}

TEST_CASE("modulus of sin on [0,3] holds on sampled pairs") {
    const auto r = bsa_range(extension<F64>(parse("sin(x)"), "x"), iv<F64>(0, 3), 0.01, 100000);
    REQUIRE(r.status == BsaStatus::success);
    const auto m = modulus_estimate(r.covering);
    Gen g(402);
    for (int i = 0; i < 10000; ++i) {
        const double a = std::uniform_real_distribution<double>(0, 3)(g.engine());
        const double b = std::fmin(3.0, std::fmax(0.0, a + std::uniform_real_distribution<double>(-1, 1)(g.engine()) * m.delta));
        REQUIRE(std::fabs(std::sin(a) - std::sin(b)) <= m.bound);
    }
}

// ---- ITRA -------------------------------------------------------------------------

TEST_CASE("trapezoid enclosure of x on [0,1]") {
    const auto j = itra(extension<Rat>(parse("x"), "x"), Rational(0), Rational(1), 4);
    CHECK(j == ivq(Rational(3, 8), Rational(5, 8)));
}

TEST_CASE("trapezoid enclosure of a constant is exact") {
    const auto j = itra(extension<Rat>(parse("7/3"), "x"), Rational(1), Rational(4), 5);
    CHECK(j == ivq(Rational(7), Rational(7)));
}

TEST_CASE_TEMPLATE("trapezoid enclosure of exp(-x)", B, F64, Rat) {
    const auto j = itra(extension<B>(parse("exp(-x)"), "x"), B::from_int(0), B::from_int(1), 1024);
    const Exact em = support::exp_bounds(Rational(-1));
    CHECK(support::lo_of(j) <= 1 - em.hi);
    CHECK(1 - em.lo <= support::hi_of(j));
    CHECK(B::approx(diam(j)) <= 2e-3);
}

TEST_CASE("trapezoid argument errors") {
    const auto f = extension<Rat>(parse("x"), "x");
    CHECK_THROWS_AS(itra(f, Rational(1), Rational(0), 4), DomainError);
    CHECK_THROWS_AS(itra(f, Rational(0), Rational(1), 0), DomainError);
    CHECK_THROWS_AS(itra(extension<Rat>(parse("1/x"), "x"), Rational(-1), Rational(1), 3), DomainError);
}

TEST_CASE("trapezoid enclosures of random polynomials") {
    Gen g(403);
    for (int k = 0; k < 20; ++k) {
        std::vector<Rational> c;
        const long degree = g.integer(0, 5);
        for (long i = 0; i <= degree; ++i) c.push_back(Rational(g.integer(-50, 50), g.integer(1, 20)));
        const Rational a(g.integer(-10, 10), 4);
        const Rational b = a + Rational(g.integer(1, 12), 4);
        const Rational exact = poly_integral(c, a, b);
        const auto f = extension<Rat>(horner(c), "x");
        for (std::size_t n : {1, 2, 3, 4, 7, 8, 16, 100, 128}) {
            const auto j = itra(f, a, b, n);
            INFO(print(horner(c)), " n = ", n);
            REQUIRE(j.contains(exact));
        }
    }
}

// ---- interval Newton -----------------------------------------------------------

TEST_CASE("Newton trichotomy on x^2 - 2") {
    const Expr f = parse("x^2 - 2");
    const Rational goal(1, 1000000000000);
    const auto found = interval_newton(f, "x", iv<Rat>(1, 2), goal, 100);
    REQUIRE(found.status == NewtonStatus::solution_found);
    CHECK(diam(*found.enclosure) <= goal);
    CHECK(found.enclosure->lo() * found.enclosure->lo() <= 2);
    CHECK(found.enclosure->hi() * found.enclosure->hi() >= 2);

    CHECK(interval_newton(f, "x", iv<Rat>(2, 3), goal, 100).status == NewtonStatus::no_solution);
    CHECK(interval_newton(f, "x", iv<Rat>(-2, 2), goal, 100).status == NewtonStatus::failure);
}

TEST_CASE("first Newton step on x^2 - 2 over [1,2]") {
    const auto one = interval_newton(parse("x^2 - 2"), "x", iv<Rat>(1, 2), Rational(1, 1000), 1);
    REQUIRE(one.status == NewtonStatus::solution_found);
    CHECK(*one.enclosure == ivq(Rational(11, 8), Rational(23, 16)));
    CHECK(one.iterations == 1);
}

TEST_CASE("Newton on binary64") {
    const auto r = interval_newton(parse("x^2 - 2"), "x", iv<F64>(1, 2), 1e-12, 100);
    REQUIRE(r.status == NewtonStatus::solution_found);
    CHECK(r.enclosure->contains(std::sqrt(2.0)));
    CHECK(diam(*r.enclosure) <= 1e-12);
}

TEST_CASE("Newton budget and argument errors") {
    CHECK(interval_newton(parse("x^2 - 2"), "x", iv<Rat>(0, 100), Rational(1, 1000), 0).status == NewtonStatus::budget);
    CHECK_THROWS_AS(interval_newton(parse("x"), "x", iv<Rat>(0, 1), Rational(0), 10), DomainError);
    CHECK_THROWS_AS(interval_newton(parse("step(0, 1, 2; x)"), "x", iv<Rat>(0, 1), Rational(1), 10),
                    NonDifferentiable);
}

TEST_CASE("Newton never loses a planted root") {
    Gen g(404);
    for (int k = 0; k < 200; ++k) {
        const Rational root(g.integer(0, 400), g.integer(1, 200));
        const Rational left(g.integer(1, 64), 64);
        const Rational right(g.integer(1, 64), 64);
        // (x - root)(x + 3) is increasing on [root - 1, root + 1]
        const std::vector<Rational> c = {-3 * root, 3 - root, Rational(1)};
        const Expr f = horner(c);
        const auto x0 = ivq(root - left, root + right);
        for (std::size_t iters : {1, 2, 3, 5, 50}) {
            const auto r = interval_newton(f, "x", x0, Rational(1, 1000000), iters);
            INFO("root ", root.get_str(), " iterations ", iters);
            REQUIRE(r.status != NewtonStatus::no_solution);
            REQUIRE(r.status != NewtonStatus::failure);
            if (r.status == NewtonStatus::solution_found) {
                REQUIRE(r.enclosure->contains(root));
                // sign change witnessed by exact evaluation at the ends
                REQUIRE(poly_value(c, r.enclosure->lo()) * poly_value(c, r.enclosure->hi()) <= 0);
            }
        }
        REQUIRE(interval_newton(f, "x", x0, Rational(1, 1000000), 50).status == NewtonStatus::solution_found);
    }
}

TEST_CASE("Newton reports no solution when the root is outside") {
    Gen g(405);
    for (int k = 0; k < 200; ++k) {
        const Rational root(g.integer(0, 400), g.integer(1, 200));
        const std::vector<Rational> c = {-3 * root, 3 - root, Rational(1)};
        const Rational gap(g.integer(1, 64), 64);
        const auto x0 = ivq(root + gap, root + gap + Rational(g.integer(1, 64), 64));
        const auto r = interval_newton(horner(c), "x", x0, Rational(1, 1000000), 200);
        REQUIRE(r.status == NewtonStatus::no_solution);
    }
}

// ---- Kantorovich ----------------------------------------------------------------

TEST_CASE("Kantorovich test for x^2 - 2 at 3/2") {
    EvalContext<Rat> ctx;
    ctx.tol = Rational(1, 1000000) * Rational(1, 1000000) * Rational(1, 1000000) * Rational(1, 100);
    const auto k = kantorovich_step<Rat>(parse("x^2 - 2"), "x", Rational(3, 2), Rational(1, 10), ctx);
    CHECK(k.eta == Rational(1, 12));
    CHECK(k.K == Rational(2, 3));
    CHECK(k.h == Rational(1, 18));
    CHECK(k.satisfied);
    // r = (1 - sqrt(8/9)) * 3/2 = 3/2 - sqrt(2)
    const Exact s = sqrt2();
    CHECK(abs(k.r - (Rational(3, 2) - s.lo)) <= Rational(1, 1000000000000));
    CHECK(k.r >= Rational(3, 2) - s.hi);
    CHECK(k.iterate == Rational(17, 12));

    // classical iteration converges inside the ball
    double xk = 1.5;
    for (int i = 0; i < 50; ++i) xk -= (xk * xk - 2) / (2 * xk);
    CHECK(std::fabs(xk - 1.5) <= k.r.get_d());
    const auto n = interval_newton(parse("x^2 - 2"), "x", iv<Rat>(1, 2), Rational(1, 1000000000000), 100);
    REQUIRE(n.status == NewtonStatus::solution_found);
    CHECK(n.enclosure->lo().get_d() <= xk + 1e-15);
    CHECK(xk - 1e-15 <= n.enclosure->hi().get_d());
}

TEST_CASE("Kantorovich for an affine function") {
    const auto k = kantorovich_step<Rat>(parse("x"), "x", Rational(5), Rational(10));
    CHECK(k.eta == 5);
    CHECK(k.K == 0);
    CHECK(k.h == 0);
    CHECK(k.r == 5);
    CHECK(k.satisfied);
    CHECK(k.iterate == 0);
    CHECK_FALSE(kantorovich_step<Rat>(parse("x"), "x", Rational(5), Rational(1)).satisfied);
}

TEST_CASE("Kantorovich at a critical point") {
    CHECK_THROWS_AS(kantorovich_step<Rat>(parse("x^2 - 2"), "x", Rational(0), Rational(1, 10)), SingularDerivative);
}

TEST_CASE("Kantorovich is not satisfied far from the root") {
    const auto k = kantorovich_step<Rat>(parse("x^2 - 2"), "x", Rational(10), Rational(1, 10));
    CHECK_FALSE(k.satisfied);
}

// ---- Brouwer ------------------------------------------------------------------------

TEST_CASE_TEMPLATE("Brouwer examples", B, F64, Rat) {
    const auto inside = brouwer_check(parse("x/2 + 1/4"), "x", iv<B>(0, 1));
    CHECK(inside.verdict == BrouwerVerdict::fixed_point_exists);
    CHECK(support::lo_of(inside.image) <= Rational(1, 4));
    CHECK(support::hi_of(inside.image) >= Rational(3, 4));
    CHECK(brouwer_check(parse("x"), "x", iv<B>(0, 1)).verdict == BrouwerVerdict::inconclusive);
    CHECK(brouwer_check(parse("x + 1"), "x", iv<B>(0, 1)).verdict == BrouwerVerdict::inconclusive);
}

TEST_CASE("Brouwer verdicts come with a fixed point") {
    Gen g(406);
    int proved = 0;
    for (int k = 0; k < 500; ++k) {
        // f(x) = a x + b, fixed point b / (1 - a)
        const Rational a(g.integer(-9, 9), 10);
        const Rational b(g.integer(-20, 20), 10);
        const Rational lo(g.integer(-30, 0), 10);
        const Rational hi = lo + Rational(g.integer(1, 40), 10);
        const Expr f = Expr::binary(ExprKind::add, Expr::binary(ExprKind::mul, lit(a), x()), lit(b));
        const auto r = brouwer_check(f, "x", ivq(lo, hi));
        if (r.verdict == BrouwerVerdict::fixed_point_exists) {
            ++proved;
            const Rational fixed = b / (1 - a);
            REQUIRE(lo < fixed);
            REQUIRE(fixed < hi);
        }
    }
    CHECK(proved > 10);
}
