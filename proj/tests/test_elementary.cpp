#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mpfr.h>

#include <cmath>
#include <functional>
#include <string>

#include "rigor/elementary.hpp"
#include "support.hpp"

using namespace rigor;
using support::Exact;
using support::Gen;

namespace {

using MpfrFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

// Certified bounds on fn(x) from correctly rounded MPFR at 400 bits.
Exact mpfr_bounds(MpfrFn fn, double x) {
    mpfr_t in, out;
    mpfr_init2(in, 400);
    mpfr_init2(out, 400);
    mpfr_set_d(in, x, MPFR_RNDN);
    Exact r;
    mpq_class q;
    fn(out, in, MPFR_RNDD);
    mpfr_get_q(q.get_mpq_t(), out);
    r.lo = q;
    fn(out, in, MPFR_RNDU);
    mpfr_get_q(q.get_mpq_t(), out);
    r.hi = q;
    mpfr_clear(in);
    mpfr_clear(out);
    return r;
}

// The true value lies in v, so an enclosure that misses v entirely is wrong.
template <class B>
bool consistent(const Interval<B>& r, const Exact& v) {
    return support::lo_of(r) <= v.hi && v.lo <= support::hi_of(r);
}

template <class B>
typename B::scalar tol_of(const char* text) {
    return B::from_rational(*parse_rational(text), Rounding::down);
}

template <class B>
Interval<B> iv(double lo, double hi) {
    return Interval<B>(B::from_rational(Rational(lo), Rounding::down), B::from_rational(Rational(hi), Rounding::up));
}

struct Case {
    const char* name;
    MpfrFn oracle;
    double lo;
    double hi;
};

template <class B>
Interval<B> apply(const std::string& name, const Interval<B>& x, const typename B::scalar& tol) {
    if (name == "exp") return exp_iv(x, tol);
    if (name == "log") return log_iv(x, tol);
    if (name == "sqrt") return sqrt_iv(x, tol);
    if (name == "sin") return sin_iv(x, tol);
    return cos_iv(x, tol);
}

const Case cases[] = {
    {"exp", mpfr_exp, -20, 20},
    {"log", mpfr_log, 1e-3, 1e3},
    {"sqrt", mpfr_sqrt, 0, 1e3},
    {"sin", mpfr_sin, -50, 50},
    {"cos", mpfr_cos, -50, 50},
};

}  // namespace

TEST_CASE("exp of zero is tight") {
    const auto r = exp_iv(iv<Rat>(0, 0), tol_of<Rat>("1/1000000000000"));
    CHECK(support::contains(r, Rational(1)));
    CHECK(diam(r) <= Rational(2) / 1000000000000);
    const auto f = exp_iv(iv<F64>(0, 0), 1e-12);
    CHECK(f.contains(1.0));
    CHECK(diam(f) <= 2e-12);
}

TEST_CASE("exp on [0,1] encloses [1, e] and is nearly tight") {
    const Rational tol(1, 1000000000);
    const auto r = exp_iv(iv<Rat>(0, 1), tol);
    const Exact e = support::exp_bounds(Rational(1));
    CHECK(r.lo() <= 1);
    CHECK(e.hi <= r.hi());
    CHECK(diam(r) <= e.lo - 1 + 2 * tol);
}

TEST_CASE_TEMPLATE("sqrt of perfect squares", B, F64, Rat) {
    const auto r = sqrt_iv(iv<B>(4, 9), tol_of<B>("1/1000000000000"));
    CHECK(support::contains(r, Rational(2)));
    CHECK(support::contains(r, Rational(3)));
    CHECK(support::hi_of(r) - support::lo_of(r) <= Rational(1) + Rational(1, 1000000));
}

TEST_CASE("sin on [0,4] reaches the maximum at pi/2") {
    const Rational tol(1, 1000000000);
    const auto r = sin_iv(iv<Rat>(0, 4), tol);
    const Exact s4 = support::sin_cos_bounds(Rational(4), false);
    CHECK(r.lo() <= s4.lo);
    CHECK(r.hi() >= 1);
    CHECK(r.hi() <= 1);
    // sin 4 is the smallest value on [0,4]; the lower end may only sit tol below it
    CHECK(r.lo() >= s4.lo - 2 * tol);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(log_iv(iv<Rat>(0, 1), Rational(1, 1000)), DomainError);
    CHECK_THROWS_AS(sqrt_iv(iv<Rat>(-1, 1), Rational(1, 1000)), DomainError);
    CHECK_THROWS_AS(log_iv(iv<F64>(-2, -1), 1e-9), DomainError);
}

TEST_CASE("exp overflow on binary64") {
    CHECK_THROWS_AS(exp_iv(iv<F64>(0, 1000), 1e-9), Overflow);
}

TEST_CASE_TEMPLATE("dense sampling stays inside the enclosure", B, F64, Rat) {
    Gen g(B::exact ? 201 : 202);
    const auto tol = tol_of<B>("1/1000000000");
    const double widths[] = {0.0, 1e-6, 1e-2, 1.0, 10.0};
    for (const Case& c : cases) {
        int violations = 0;
        for (int k = 0; k < 20; ++k) {
            const double a = std::uniform_real_distribution<double>(c.lo, c.hi)(g.engine());
            const double w = widths[g.integer(0, 4)] * std::uniform_real_distribution<double>(0, 1)(g.engine());
            const double b = std::fmin(c.hi, a + w);
            const auto x = iv<B>(a, b);
            const auto r = apply<B>(c.name, x, tol);
            for (int i = 0; i < 500; ++i) {
                double p = a + std::uniform_real_distribution<double>(0, 1)(g.engine()) * (b - a);
                p = std::fmin(std::fmax(p, a), b);
                const Exact v = mpfr_bounds(c.oracle, p);
                if (!consistent(r, v)) ++violations;
            }
        }
        INFO(c.name);
        CHECK(violations == 0);
    }
}

TEST_CASE("quality bound on shrinking intervals") {
    const Rational tol(1, 1000000000000);
    struct Mono {
        const char* name;
        MpfrFn oracle;
        double x0;
        bool increasing;
    };
    const Mono fns[] = {{"exp", mpfr_exp, 0.7, true},
                        {"log", mpfr_log, 2.5, true},
                        {"sqrt", mpfr_sqrt, 3.0, true},
                        {"sin", mpfr_sin, 0.3, true},
                        {"cos", mpfr_cos, 0.3, false}};
    for (const Mono& f : fns) {
        Rational previous = -1;
        for (int k = 0; k <= 40; k += 4) {
            const double w = std::ldexp(1.0, -k);
            const auto x = iv<Rat>(f.x0, f.x0 + w);
            const auto r = apply<Rat>(f.name, x, tol);
            const Exact at_lo = mpfr_bounds(f.oracle, f.x0);
            const Exact at_hi = mpfr_bounds(f.oracle, f.x0 + w);
            const Rational true_diam = f.increasing ? at_hi.hi - at_lo.lo : at_lo.hi - at_hi.lo;
            INFO(f.name, " width 2^-", k);
            CHECK(diam(r) <= true_diam + 2 * tol);
            // the excess over the true range shrinks with the interval
            const Rational excess = diam(r) - (f.increasing ? at_hi.lo - at_lo.hi : at_lo.lo - at_hi.hi);
            CHECK(excess <= 2 * tol + Rational(1, 1000000000) * w);
            if (previous >= 0) CHECK(diam(r) <= previous);
            previous = diam(r);
        }
    }
}

TEST_CASE("the term-by-term exponential overestimates on -[0,1]") {
    const auto r = naive_exp(neg(iv<Rat>(0, 1)), 30);
    const Exact e = support::exp_bounds(Rational(1));
    CHECK(diam(r) >= e.hi - 1);
    const Exact em = support::exp_bounds(Rational(-1));
    // 1 - sinh 1 and cosh 1 bounded outward from the oracle
    const Rational sinh_hi = (e.hi - em.lo) / 2;
    const Rational cosh_hi = (e.hi + em.hi) / 2;
    CHECK(r.lo() <= 1 - sinh_hi);
    CHECK(r.hi() >= cosh_hi);
    CHECK(r.hi() <= cosh_hi + Rational(1, 1000000));
}

TEST_CASE("the overestimation gap is at least h squared") {
    for (const Rational h : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
        const auto naive = naive_exp(neg(Interval<Rat>(Rational(0), h)), 30);
        // true range diameter is 1 - e^-h, bounded above with the oracle
        const Rational true_diam = 1 - support::exp_bounds(-h).lo;
        INFO("h = ", h.get_str());
        CHECK(diam(naive) - true_diam >= h * h);
    }
}

TEST_CASE("tight exp on -[0,1] against the naive sum") {
    const auto tight = exp_iv(neg(iv<Rat>(0, 1)), Rational(1, 1000000000));
    const Rational true_diam = 1 - support::exp_bounds(Rational(-1)).lo;
    CHECK(diam(tight) <= true_diam + Rational(1, 1000000));
    CHECK(diam(naive_exp(neg(iv<Rat>(0, 1)), 30)) > diam(tight) + 1);
}

TEST_CASE_TEMPLATE("naive exp of a point has no dependency effect", B, F64, Rat) {
    const auto r = naive_exp(iv<B>(0, 0), 30);
    CHECK(r.contains(B::from_int(1)));
    CHECK(B::approx(diam(r)) <= 1e-15);
}

TEST_CASE("naive exp containment on random intervals") {
    Gen g(203);
    for (int k = 0; k < 200; ++k) {
        const double a = std::uniform_real_distribution<double>(-3, 3)(g.engine());
        const double b = a + std::uniform_real_distribution<double>(0, 2)(g.engine());
        const auto r = naive_exp(iv<Rat>(a, b), 30);
        for (double p : {a, b, (a + b) / 2}) {
            const Exact v = mpfr_bounds(mpfr_exp, p);
            REQUIRE(consistent(r, v));
        }
    }
}

TEST_CASE_TEMPLATE("step extension examples", B, F64, Rat) {
    const StepSpec<B> s{B::from_rational(Rational(1, 2), Rounding::down), B::from_int(2), B::from_int(1), B::from_int(0)};
    CHECK(step_extension(s, iv<B>(0, 0.25)) == iv<B>(1, 1));
    CHECK(step_extension(s, iv<B>(0, 1)) == iv<B>(1, 2));
    CHECK(step_extension(s, iv<B>(0.75, 1)) == iv<B>(2, 2));
    // s_c is a2 at c itself
    CHECK(step_extension(s, iv<B>(0.5, 0.5)) == iv<B>(1, 1));
}

TEST_CASE_TEMPLATE("step extension with slack straddling c is wide", B, F64, Rat) {
    Gen g(B::exact ? 204 : 205);
    for (int k = 0; k < 200; ++k) {
        const double delta = std::ldexp(1.0, -static_cast<int>(g.integer(2, 40)));
        const StepSpec<B> s{B::from_rational(Rational(1, 2), Rounding::down), B::from_int(2), B::from_int(1),
                            B::from_rational(Rational(delta), Rounding::down)};
        const double reach = delta * std::uniform_real_distribution<double>(0, 1)(g.engine());
        const auto x = iv<B>(0.5 - reach, 0.5 + reach);
        REQUIRE(B::approx(diam(step_extension(s, x))) >= 1.0);
    }
}

TEST_CASE_TEMPLATE("step extension with no slack is minimal on one-sided intervals", B, F64, Rat) {
    Gen g(B::exact ? 206 : 207);
    const StepSpec<B> s{B::from_rational(Rational(1, 2), Rounding::down), B::from_int(2), B::from_int(1), B::from_int(0)};
    for (int k = 0; k < 1000; ++k) {
        const double a = std::uniform_real_distribution<double>(-5, 5)(g.engine());
        const double b = a + std::uniform_real_distribution<double>(0, 5)(g.engine());
        if (a <= 0.5 && b > 0.5) continue;
        const auto r = step_extension(s, iv<B>(a, b));
        REQUIRE(r.is_degenerate());
        REQUIRE(r == (b <= 0.5 ? iv<B>(1, 1) : iv<B>(2, 2)));
    }
}

TEST_CASE_TEMPLATE("step extension encloses the step function", B, F64, Rat) {
    Gen g(B::exact ? 208 : 209);
    for (int k = 0; k < 1000; ++k) {
        const double c = std::uniform_real_distribution<double>(-2, 2)(g.engine());
        const double delta = g.coin() ? 0.0 : std::ldexp(1.0, -static_cast<int>(g.integer(1, 30)));
        const StepSpec<B> s{B::from_rational(Rational(c), Rounding::down), B::from_int(g.integer(-3, 3)),
                            B::from_int(g.integer(-3, 3)), B::from_rational(Rational(delta), Rounding::down)};
        const double a = std::uniform_real_distribution<double>(-3, 3)(g.engine());
        const double b = a + std::uniform_real_distribution<double>(0, 2)(g.engine());
        const auto x = iv<B>(a, b);
        const auto r = step_extension(s, x);
        for (int i = 0; i < 10; ++i) {
            const Rational p = g.point_in(x);
            const auto v = p > Rational(c) ? s.a1 : s.a2;
            REQUIRE(r.contains(v));
        }
    }
}

TEST_CASE_TEMPLATE("relaxed hull", B, F64, Rat) {
    const auto x = iv<B>(1, 2);
    CHECK(relaxed_hull(x, B::from_int(0)) == x);
    const auto r = relaxed_hull(x, B::from_rational(Rational(1, 4), Rounding::down));
    CHECK(subset(x, r));
    CHECK(support::lo_of(r) >= Rational(7, 8));
    CHECK(support::hi_of(r) <= Rational(17, 8));
    CHECK_THROWS_AS(relaxed_hull(x, B::from_int(-1)), DomainError);
}
