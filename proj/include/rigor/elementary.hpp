#pragma once

// Interval extensions of exp, log, sin, cos and sqrt, the term-by-term
// exponential series used to exhibit the dependency problem, and the step
// function extension F_delta.
//
// Every enclosure is a Taylor (or atanh) partial sum evaluated in interval
// arithmetic plus an explicit Lagrange remainder interval, so containment
// follows from the containment of the underlying interval operations. On the
// Rat backend intermediate values are rounded outward onto a dyadic grid to
// keep the rationals small; `tol` is the absolute width budget of a call.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <type_traits>

#include "rigor/interval.hpp"

namespace rigor {

namespace detail {

template <class B>
Interval<B> constant(long n) { return Interval<B>(B::from_int(n)); }

template <class B>
Interval<B> symmetric(const typename B::scalar& r) { return Interval<B>(B::neg(r), r); }

template <class B>
Interval<B> coarse(const Interval<B>& x, long bits) {
    if constexpr (B::exact) {
        typename B::scalar lo = x.lo();
        typename B::scalar hi = x.hi();
        B::coarsen(lo, hi, bits);
        return Interval<B>(std::move(lo), std::move(hi));
    } else {
        (void)bits;
        return x;
    }
}

// Grid resolution for Rat coarsening that keeps the rounding error far below
// an absolute target.
inline long grid_bits(double target, int extra) {
    if (!(target > 0)) target = 1e-300;
    return static_cast<long>(std::ceil(-std::log2(target))) + extra + 8;
}

// True when a remainder bound can no longer improve the enclosure: below the
// target, or (binary64) below the rounding noise of the sum.
template <class B>
bool remainder_done(const typename B::scalar& rem, const Interval<B>& sum, double target) {
    const double r = B::approx(rem);
    if (r <= target) return true;
    if constexpr (!B::exact) {
        return r <= 0x1p-60 * B::approx(mag(sum));
    }
    return false;
}

[[noreturn]] inline void series_did_not_converge() {
    throw Overflow("series enclosure did not reach the requested tolerance");
}

// e^y for mag(y) <= 1/2. Remainder after the degree-j partial sum is bounded
// by |y|^(j+1)/(j+1)! * e^|y| <= 2 |y|^(j+1)/(j+1)!.
template <class B>
Interval<B> exp_taylor(const Interval<B>& y, double target, long bits) {
    using S = typename B::scalar;
    const S m = mag(y);
    Interval<B> term = constant<B>(1);
    Interval<B> sum = term;
    for (long j = 1; j < 2000; ++j) {
        term = coarse(div(mul(term, y), constant<B>(j)), bits);
        sum = coarse(add(sum, term), bits);
        S rem = B::mul(B::div(B::mul(mag(term), m, Rounding::up), B::from_int(j + 1), Rounding::up),
                       B::from_int(2), Rounding::up);
        if (rem == 0) return sum;
        if (remainder_done(rem, sum, target)) return add(sum, symmetric<B>(rem));
    }
    series_did_not_converge();
}

// atanh(z) = sum z^(2j+1)/(2j+1) for mag(z) <= 1/3; the tail after the last
// included term is below |z|^(2N+1)/(2N+1) * 1/(1-z^2) <= 9/8 of that.
template <class B>
Interval<B> atanh_series(const Interval<B>& z, double target, long bits) {
    using S = typename B::scalar;
    const Interval<B> z2 = pow(z, 2);
    Interval<B> power = z;
    Interval<B> sum = z;
    const S m2 = mag(z2);
    for (long j = 1; j < 2000; ++j) {
        power = coarse(mul(power, z2), bits);
        sum = coarse(add(sum, div(power, constant<B>(2 * j + 1))), bits);
        S next = B::mul(mag(power), m2, Rounding::up);
        if (next == 0) return sum;
        S rem = B::div(B::mul(next, B::from_int(9), Rounding::up), B::from_int(8 * (2 * j + 3)), Rounding::up);
        if (remainder_done(rem, sum, target)) return add(sum, symmetric<B>(rem));
    }
    series_did_not_converge();
}

// arctan(1/n) for n >= 2; alternating series, tail below the first omitted term.
template <class B>
Interval<B> atan_inverse(long n, double target, long bits) {
    using S = typename B::scalar;
    const Interval<B> z = div(constant<B>(1), constant<B>(n));
    const Interval<B> z2 = mul(z, z);
    Interval<B> power = z;
    Interval<B> sum = z;
    for (long j = 1; j < 2000; ++j) {
        power = coarse(mul(power, z2), bits);
        Interval<B> term = div(power, constant<B>(2 * j + 1));
        sum = coarse((j % 2 == 1) ? sub(sum, term) : add(sum, term), bits);
        S rem = B::div(B::mul(mag(power), mag(z2), Rounding::up), B::from_int(2 * j + 3), Rounding::up);
        if (remainder_done(rem, sum, target)) return add(sum, symmetric<B>(rem));
    }
    series_did_not_converge();
}

template <class B>
Interval<B> machin_pi(double target) {
    const long bits = grid_bits(target, 8);
    const Interval<B> a = atan_inverse<B>(5, target / 64, bits);
    const Interval<B> b = atan_inverse<B>(239, target / 64, bits);
    return sub(mul(constant<B>(16), a), mul(constant<B>(4), b));
}

template <class B>
Interval<Rat> to_rat(const Interval<B>& x) {
    return Interval<Rat>(B::to_rational(x.lo()), B::to_rational(x.hi()));
}

}  // namespace detail

/// Enclosure of pi with width at most tol (binary64: a few ulps at best).
template <class B>
Interval<B> pi_enclosure(const typename B::scalar& tol) {
    if constexpr (std::is_same_v<B, F64>) {
        (void)tol;
        static const Interval<F64> pi = detail::machin_pi<F64>(0.0);
        return pi;
    } else {
        const double t = B::approx(tol);
        if (t >= 1e-14) return detail::to_rat(pi_enclosure<F64>(0.0));
        return detail::machin_pi<B>(t / 4);
    }
}

// ---- exp ------------------------------------------------------------------

template <class B>
Interval<B> exp_point(const typename B::scalar& x, const typename B::scalar& tol);

namespace detail {

// e^y for 0 <= y <= 1/2. All terms are positive, so Horner's scheme with
// every operation rounded down (up) bounds the degree-18 partial sum from
// below (above); the tail is below 2 y^19/19!.
inline Interval<F64> exp_small_f64(double y) {
    constexpr int degree = 18;
    double lo = 1.0;
    double hi = 1.0;
    for (int j = degree; j >= 1; --j) {
        lo = F64::add(1.0, F64::mul(F64::div(y, j, Rounding::down), lo, Rounding::down), Rounding::down);
        hi = F64::add(1.0, F64::mul(F64::div(y, j, Rounding::up), hi, Rounding::up), Rounding::up);
    }
    double tail = 2.0;
    for (int j = 1; j <= degree + 1; ++j) tail = F64::mul(tail, F64::div(y, j, Rounding::up), Rounding::up);
    return Interval<F64>(lo, F64::add(hi, tail, Rounding::up));
}

// e^x = (e^(|x|/2^k))^(2^k), inverted for negative x.
inline Interval<F64> exp_f64(double x) {
    if (x > 709.0) throw Overflow("exp overflows binary64");
    if (x < -708.0) {
        // e^x < e^-708; keep a nonnegative enclosure instead of underflowing.
        return Interval<F64>(0.0, exp_f64(-708.0).hi());
    }
    const double a = std::fabs(x);
    int k = 0;
    while (a > std::ldexp(0.5, k)) ++k;
    const Interval<F64> e = exp_small_f64(std::ldexp(a, -k));
    double lo = e.lo();
    double hi = e.hi();
    for (int i = 0; i < k; ++i) {
        lo = F64::mul(lo, lo, Rounding::down);
        hi = F64::mul(hi, hi, Rounding::up);
    }
    if (x < 0) return Interval<F64>(F64::div(1.0, hi, Rounding::down), F64::div(1.0, lo, Rounding::up));
    return Interval<F64>(lo, hi);
}

// Cheaper e^x for the Rat fast path: round-to-nearest Horner and squaring
// with an a-priori relative error bound instead of directed rounding. For
// 0 <= y <= 1/2 each Horner step multiplies the relative error by at most
// (1+u)^3, so 18 steps stay below 55u; the series tail is below u/1000.
// Squaring maps a relative error E to (1+E)^2 (1+u) - 1.
inline Interval<F64> exp_f64_fast(double x) {
    constexpr double u = 0x1p-53;
    if (!(std::fabs(x) <= 700.0)) return exp_f64(x);
    const double a = std::fabs(x);
    if (a < 0x1p-500) {
        // 1 <= e^a <= 1 + 2a
        const Interval<F64> e(1.0, F64::add(1.0, 2.0 * a, Rounding::up));
        if (x < 0) return Interval<F64>(F64::div(1.0, e.hi(), Rounding::down), 1.0);
        return e;
    }
    int k = 0;
    while (a > std::ldexp(0.5, k)) ++k;
    const double y = std::ldexp(a, -k);
    double p = 1.0;
    for (int j = 18; j >= 1; --j) p = 1.0 + (y / j) * p;
    double err = 56 * u;
    for (int i = 0; i < k; ++i) {
        p = p * p;
        err = (2.0 + err) * err * 1.000001 + 2 * u;
    }
    const double lo = F64::mul(p, F64::sub(1.0, err, Rounding::down), Rounding::down);
    const double hi = F64::mul(p, F64::add(1.0, err, Rounding::up), Rounding::up);
    if (x < 0) return Interval<F64>(F64::div(1.0, hi, Rounding::down), F64::div(1.0, lo, Rounding::up));
    return Interval<F64>(lo, hi);
}

template <class B>
Interval<B> exp_point_series(const typename B::scalar& x, double tol) {
    const double xa = B::approx(x);
    if constexpr (!B::exact) {
        return exp_f64(x);
    } else {
        if (std::fabs(xa) > 1e5) throw Overflow("exp argument too large to enclose");
    }
    int k = 0;
    while (std::fabs(xa) > 0.5 * std::ldexp(1.0, k)) ++k;
    const Interval<B> y(B::scale2(x, -k));

    const double value = std::exp(xa);
    const double scale = std::max(value, 1e-300);
    const double target = tol / (scale * std::ldexp(1.0, k + 3));
    const long bits = grid_bits(tol, 2 * k + 8 + static_cast<int>(std::max(0.0, std::log2(scale))));

    Interval<B> r = exp_taylor<B>(y, target, bits);
    for (int i = 0; i < k; ++i) r = coarse(mul(r, r), bits);
    if (r.lo() < 0) r = Interval<B>(B::from_int(0), r.hi());
    return r;
}

// Binary64 enclosure of e^v for a rational v when it is at most budget
// wide; the Rat backend uses it to avoid long rational series.
inline std::optional<Interval<F64>> exp_point_via_f64(const Rational& v, double budget) {
    const double lo = round_to_double(v, Rounding::down);
    if (!(std::fabs(lo) < 700.0)) return std::nullopt;
    const double hi = round_to_double(v, Rounding::up);
    const Interval<F64> a = exp_f64_fast(lo);
    const Interval<F64> r(a.lo(), lo == hi ? a.hi() : exp_f64_fast(hi).hi());
    if (F64::sub(r.hi(), r.lo(), Rounding::up) <= budget) return r;
    return std::nullopt;
}

}  // namespace detail

/// Enclosure of e^x for a single representable x.
template <class B>
Interval<B> exp_point(const typename B::scalar& x, const typename B::scalar& tol) {
    const double t = B::approx(tol);
    if constexpr (std::is_same_v<B, Rat>) {
        if (auto r = detail::exp_point_via_f64(x, t)) return detail::to_rat(*r);
    }
    return detail::exp_point_series<B>(x, t);
}

template <class B>
Interval<B> exp_iv(const Interval<B>& x, const typename B::scalar& tol) {
    if constexpr (std::is_same_v<B, Rat>) {
        // get_d truncates, so the budget is at most tol/2.
        const double budget = B::approx(tol) / 2;
        const auto lo = detail::exp_point_via_f64(x.lo(), budget);
        if (lo) {
            const auto hi = x.is_degenerate() ? lo : detail::exp_point_via_f64(x.hi(), budget);
            if (hi) return Interval<B>(ordered, lo->lo(), hi->hi());
        }
    }
    const typename B::scalar half = B::div(tol, B::from_int(2), Rounding::down);
    return Interval<B>(exp_point<B>(x.lo(), half).lo(), exp_point<B>(x.hi(), half).hi());
}

// ---- log ------------------------------------------------------------------

template <class B>
Interval<B> log_point(const typename B::scalar& x, const typename B::scalar& tol) {
    using S = typename B::scalar;
    if (!(x > 0)) throw DomainError("log of a nonpositive number");
    const double t = B::approx(tol);
    if constexpr (std::is_same_v<B, Rat>) {
        const double xa = B::approx(x);
        if (xa > 1e-300 && xa < 1e300) {
            const Interval<F64> xf = enclose<F64>(x);
            if (xf.lo() > 0) {
                const Interval<F64> rf(log_point<F64>(xf.lo(), 0.0).lo(), log_point<F64>(xf.hi(), 0.0).hi());
                if (B::approx(diam(detail::to_rat(rf))) <= t) return detail::to_rat(rf);
            }
        }
    }
    // x = m * 2^e with m in [2/3, 4/3]
    long e = 0;
    if constexpr (B::exact) {
        e = log2_estimate(x);
    } else {
        int ex = 0;
        std::frexp(x, &ex);
        e = ex;
    }
    S m = B::scale2(x, static_cast<int>(-e));
    while (B::approx(m) > 4.0 / 3.0) {
        m = B::scale2(m, -1);
        ++e;
    }
    while (B::approx(m) < 2.0 / 3.0) {
        m = B::scale2(m, 1);
        --e;
    }
    const double target = t / (8.0 * (1.0 + std::fabs(static_cast<double>(e))));
    const long bits = detail::grid_bits(target, 8);
    const Interval<B> one = detail::constant<B>(1);
    const Interval<B> mi(m);
    const Interval<B> z = div(sub(mi, one), add(mi, one));
    Interval<B> result = mul(detail::constant<B>(2), detail::atanh_series<B>(z, target / 2, bits));
    if (e != 0) {
        const Interval<B> third = div(one, detail::constant<B>(3));
        const Interval<B> ln2 = mul(detail::constant<B>(2), detail::atanh_series<B>(third, target / 2, bits));
        result = add(result, mul(detail::constant<B>(e), ln2));
    }
    return detail::coarse(result, bits);
}

template <class B>
Interval<B> log_iv(const Interval<B>& x, const typename B::scalar& tol) {
    if (!(x.lo() > 0)) throw DomainError("log requires a positive interval");
    const typename B::scalar half = B::div(tol, B::from_int(2), Rounding::down);
    return Interval<B>(log_point<B>(x.lo(), half).lo(), log_point<B>(x.hi(), half).hi());
}

// ---- sqrt -----------------------------------------------------------------

template <class B>
Interval<B> sqrt_iv(const Interval<B>& x, const typename B::scalar& tol) {
    if (x.lo() < 0) throw DomainError("sqrt requires a nonnegative interval");
    return Interval<B>(B::sqrt(x.lo(), Rounding::down, tol), B::sqrt(x.hi(), Rounding::up, tol));
}

// ---- sin / cos ------------------------------------------------------------

namespace detail {

// sin(r) or cos(r) by Taylor series on an interval argument r.
template <class B>
Interval<B> sin_cos_taylor(const Interval<B>& r, bool cosine, double target, long bits) {
    using S = typename B::scalar;
    const Interval<B> r2 = pow(r, 2);
    const S m2 = mag(r2);
    Interval<B> term = cosine ? constant<B>(1) : r;
    Interval<B> sum = term;
    long index = cosine ? 0 : 1;
    for (int it = 0; it < 2000; ++it) {
        // |r|^(index+2)/(index+2)! bounds the remainder after this term.
        S rem = B::div(B::mul(mag(term), m2, Rounding::up), B::from_int((index + 1) * (index + 2)),
                       Rounding::up);
        if (rem == 0) return sum;
        if (remainder_done(rem, sum, target)) return add(sum, symmetric<B>(rem));
        term = coarse(neg(div(mul(term, r2), constant<B>((index + 1) * (index + 2)))), bits);
        sum = coarse(add(sum, term), bits);
        index += 2;
    }
    series_did_not_converge();
}

template <class B>
Interval<B> clamp_unit(const Interval<B>& x) {
    auto r = intersect(x, Interval<B>(B::from_int(-1), B::from_int(1)));
    return r ? *r : Interval<B>(B::from_int(-1), B::from_int(1));
}

// sin(x) (shift = 0) or cos(x) (shift = 1) for a point x, reducing modulo pi/2.
template <class B>
Interval<B> sin_cos_point_series(const typename B::scalar& x, int shift, double tol) {
    const double xa = B::approx(x);
    if (!(std::fabs(xa) < 1e15)) return Interval<B>(B::from_int(-1), B::from_int(1));
    const double q_estimate = std::nearbyint(xa / (std::numbers::pi / 2));
    const long q = static_cast<long>(q_estimate);
    const double pi_target = tol / (8.0 * (1.0 + std::fabs(q_estimate)));
    const typename B::scalar pi_tol = B::from_rational(Rational(pi_target), Rounding::down);
    const Interval<B> half_pi = div(pi_enclosure<B>(pi_tol), constant<B>(2));
    const Interval<B> r = sub(Interval<B>(x), mul(constant<B>(q), half_pi));
    const long bits = grid_bits(tol, 12);
    const int quadrant = static_cast<int>(((q + shift) % 4 + 4) % 4);
    switch (quadrant) {
        case 0: return clamp_unit(sin_cos_taylor<B>(r, false, tol / 4, bits));
        case 1: return clamp_unit(sin_cos_taylor<B>(r, true, tol / 4, bits));
        case 2: return clamp_unit(neg(sin_cos_taylor<B>(r, false, tol / 4, bits)));
        default: return clamp_unit(neg(sin_cos_taylor<B>(r, true, tol / 4, bits)));
    }
}

template <class B>
Interval<B> sin_cos_point(const typename B::scalar& x, int shift, const typename B::scalar& tol) {
    const double t = B::approx(tol);
    if constexpr (std::is_same_v<B, Rat>) {
        const double xa = B::approx(x);
        if (std::fabs(xa) < 1e6) {
            const Interval<F64> xf = enclose<F64>(x);
            const Interval<F64> lo = sin_cos_point_series<F64>(xf.lo(), shift, 0.0);
            const Interval<F64> hi = sin_cos_point_series<F64>(xf.hi(), shift, 0.0);
            // sin and cos are 1-Lipschitz, so widening the hull by the gap
            // between the two doubles covers every x in between.
            const Interval<Rat> h = detail::to_rat(hull(lo, hi));
            const Rational gap = Rational(xf.hi()) - Rational(xf.lo());
            const Interval<Rat> rf(h.lo() - gap, h.hi() + gap);
            if (B::approx(diam(rf)) <= t) return clamp_unit(rf);
        }
    }
    return sin_cos_point_series<B>(x, shift, t);
}

// Range of sin (shift = 0) or cos (shift = 1) over x: hull of the endpoint
// values plus +-1 for every extremum that may lie inside x. The extrema of
// sin(t + shift*pi/2) sit at t = pi/2 - shift*pi/2 + m*pi with value (-1)^m.
template <class B>
Interval<B> sin_cos_iv(const Interval<B>& x, int shift, const typename B::scalar& tol) {
    const Interval<B> unit(B::from_int(-1), B::from_int(1));
    if (B::approx(diam(x)) >= 6.5) return unit;
    const typename B::scalar half = B::div(tol, B::from_int(2), Rounding::down);
    Interval<B> range = hull(sin_cos_point<B>(x.lo(), shift, half), sin_cos_point<B>(x.hi(), shift, half));
    const Interval<B> pi = pi_enclosure<B>(half);
    const Interval<B> half_pi = div(pi, constant<B>(2));
    const Interval<B> offset = shift == 0 ? half_pi : constant<B>(0);
    const double lo = B::approx(x.lo()) / std::numbers::pi;
    const double hi = B::approx(x.hi()) / std::numbers::pi;
    const long m_first = static_cast<long>(std::floor(lo - 0.5 * (1 - shift))) - 1;
    const long m_last = static_cast<long>(std::ceil(hi - 0.5 * (1 - shift))) + 1;
    for (long m = m_first; m <= m_last; ++m) {
        const Interval<B> critical = add(offset, mul(constant<B>(m), pi));
        if (critical.hi() >= x.lo() && critical.lo() <= x.hi()) {
            range = hull(range, constant<B>(m % 2 == 0 ? 1 : -1));
        }
    }
    return clamp_unit(range);
}

}  // namespace detail

template <class B>
Interval<B> sin_point(const typename B::scalar& x, const typename B::scalar& tol) {
    return detail::sin_cos_point<B>(x, 0, tol);
}

template <class B>
Interval<B> cos_point(const typename B::scalar& x, const typename B::scalar& tol) {
    return detail::sin_cos_point<B>(x, 1, tol);
}

template <class B>
Interval<B> sin_iv(const Interval<B>& x, const typename B::scalar& tol) { return detail::sin_cos_iv<B>(x, 0, tol); }

template <class B>
Interval<B> cos_iv(const Interval<B>& x, const typename B::scalar& tol) { return detail::sin_cos_iv<B>(x, 1, tol); }

// ---- dependency-problem demonstrator ---------------------------------------

/// Sums the exponential series term by term on x as a whole: the j-th term is
/// x^j / j! with x^j formed by j-1 plain interval products. A remainder
/// m^N/N! * 3^ceil(m), m = mag(x), keeps the result an enclosure of e^x.
template <class B>
Interval<B> naive_exp(const Interval<B>& x, unsigned terms) {
    using S = typename B::scalar;
    if (terms < 1) throw DomainError("naive_exp needs at least one term");
    Interval<B> sum = detail::constant<B>(1);
    Interval<B> power = detail::constant<B>(1);
    Interval<B> factorial = detail::constant<B>(1);
    for (unsigned j = 1; j < terms; ++j) {
        power = mul(power, x);
        factorial = mul(factorial, detail::constant<B>(j));
        sum = add(sum, div(power, factorial));
    }
    const S m = mag(x);
    S rem = B::from_int(1);
    for (unsigned j = 0; j < terms; ++j) rem = B::mul(rem, m, Rounding::up);
    rem = B::div(rem, mul(factorial, detail::constant<B>(terms)).lo(), Rounding::up);
    const long e_bound = static_cast<long>(std::ceil(B::approx(m)));
    for (long j = 0; j < e_bound; ++j) rem = B::mul(rem, B::from_int(3), Rounding::up);
    return add(sum, detail::symmetric<B>(rem));
}

// ---- step functions -------------------------------------------------------

/// s_c(x) = a1 for x > c, a2 for x <= c, with outward slack delta >= 0.
template <class B>
struct StepSpec {
    typename B::scalar c;
    typename B::scalar a1;
    typename B::scalar a2;
    typename B::scalar delta;
};

/// rh_delta: pushes each endpoint outward by at most delta/2 onto a
/// representable number (identity for delta = 0).
template <class B>
Interval<B> relaxed_hull(const Interval<B>& x, const typename B::scalar& delta) {
    if (delta < 0) throw DomainError("step slack must be nonnegative");
    if (delta == 0) return x;
    const typename B::scalar half = B::div(delta, B::from_int(2), Rounding::down);
    return Interval<B>(B::sub(x.lo(), half, Rounding::up), B::add(x.hi(), half, Rounding::down));
}

namespace detail {

// F_delta with the literals given as enclosures (non-representable decimals
// on binary64).
template <class B>
Interval<B> step_extension(const Interval<B>& c, const Interval<B>& a1, const Interval<B>& a2,
                           const typename B::scalar& delta, const Interval<B>& x) {
    const Interval<B> threshold = relaxed_hull(c, delta);
    if (le(x, threshold)) return relaxed_hull(a2, delta);
    if (lt(threshold, x)) return relaxed_hull(a1, delta);
    return relaxed_hull(hull(a1, a2), delta);
}

}  // namespace detail

template <class B>
Interval<B> step_extension(const StepSpec<B>& spec, const Interval<B>& x) {
    return detail::step_extension(Interval<B>(spec.c), Interval<B>(spec.a1), Interval<B>(spec.a2), spec.delta, x);
}

}  // namespace rigor
