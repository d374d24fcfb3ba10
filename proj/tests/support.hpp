#pragma once

// Generators and oracles shared by the test executables. Oracles work on
// exact rationals and never call the library's own evaluators.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "rigor/interval.hpp"
#include "rigor/rational.hpp"

namespace support {

using rigor::F64;
using rigor::Interval;
using rigor::Rat;
using rigor::Rational;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }
    std::mt19937_64& engine() { return rng_; }

    // Finite binary64 values over many magnitudes, with small integers and
    // zero mixed in.
    double f64() {
        switch (integer(0, 5)) {
            case 0: return static_cast<double>(integer(-20, 20));
            case 1: return std::ldexp(static_cast<double>(integer(-(1L << 52), 1L << 52)), static_cast<int>(integer(-60, -40)));
            default: {
                const double m = std::uniform_real_distribution<double>(0.5, 1.0)(rng_);
                const double v = std::ldexp(m, static_cast<int>(integer(-30, 30)));
                return coin() ? v : -v;
            }
        }
    }

    Rational rational() {
        Rational q(integer(-2000, 2000), integer(1, 997));
        q.canonicalize();
        return q;
    }

    template <class B>
    typename B::scalar scalar() {
        if constexpr (B::exact) {
            return coin() ? rational() : Rational(f64());
        } else {
            return f64();
        }
    }

    template <class B>
    Interval<B> interval() {
        auto a = scalar<B>();
        auto b = integer(0, 7) == 0 ? a : scalar<B>();
        if (b < a) std::swap(a, b);
        return Interval<B>(a, b);
    }

    // Interval whose endpoints are both positive or both negative.
    template <class B>
    Interval<B> nonzero_interval() {
        while (true) {
            Interval<B> y = interval<B>();
            if (!y.contains_zero()) return y;
        }
    }

    // Exact rational point of x, endpoints included.
    template <class B>
    Rational point_in(const Interval<B>& x) {
        const Rational lo = B::to_rational(x.lo());
        const Rational hi = B::to_rational(x.hi());
        switch (integer(0, 4)) {
            case 0: return lo;
            case 1: return hi;
            default: {
                Rational t(integer(0, 1000), 1000);
                return lo + t * (hi - lo);
            }
        }
    }

    // Subinterval of x with exact rational endpoints rounded outward back
    // into x.
    template <class B>
    Interval<B> subinterval(const Interval<B>& x) {
        Rational a = point_in(x);
        Rational b = point_in(x);
        if (b < a) std::swap(a, b);
        auto lo = B::from_rational(a, rigor::Rounding::down);
        auto hi = B::from_rational(b, rigor::Rounding::up);
        if (lo < x.lo()) lo = x.lo();
        if (x.hi() < hi) hi = x.hi();
        return Interval<B>(lo, hi);
    }

private:
    std::mt19937_64 rng_;
};

inline Rational lo_of(const Interval<Rat>& x) { return x.lo(); }
inline Rational hi_of(const Interval<Rat>& x) { return x.hi(); }
inline Rational lo_of(const Interval<F64>& x) { return Rational(x.lo()); }
inline Rational hi_of(const Interval<F64>& x) { return Rational(x.hi()); }

template <class B>
bool contains(const Interval<B>& x, const Rational& v) {
    return lo_of(x) <= v && v <= hi_of(x);
}

enum class Op { add, sub, mul, div };

inline Rational apply(Op op, const Rational& a, const Rational& b) {
    switch (op) {
        case Op::add: return a + b;
        case Op::sub: return a - b;
        case Op::mul: return a * b;
        case Op::div: return a / b;
    }
    return 0;
}

template <class B>
Interval<B> apply(Op op, const Interval<B>& x, const Interval<B>& y) {
    switch (op) {
        case Op::add: return rigor::add(x, y);
        case Op::sub: return rigor::sub(x, y);
        case Op::mul: return rigor::mul(x, y);
        case Op::div: return rigor::div(x, y);
    }
    return x;
}

inline const char* name(Op op) {
    static const char* names[] = {"add", "sub", "mul", "div"};
    return names[static_cast<int>(op)];
}

// Exact hull of {x op y}: the extreme endpoint combinations.
struct Exact {
    Rational lo;
    Rational hi;
};

template <class B>
Exact exact_hull(Op op, const Interval<B>& x, const Interval<B>& y) {
    const Rational xs[2] = {lo_of(x), hi_of(x)};
    const Rational ys[2] = {lo_of(y), hi_of(y)};
    Exact r{apply(op, xs[0], ys[0]), apply(op, xs[0], ys[0])};
    for (const auto& a : xs) {
        for (const auto& b : ys) {
            const Rational v = apply(op, a, b);
            if (v < r.lo) r.lo = v;
            if (r.hi < v) r.hi = v;
        }
    }
    return r;
}

inline Rational factorial(long n) {
    Rational f = 1;
    for (long k = 2; k <= n; ++k) f *= k;
    return f;
}

inline Rational power(const Rational& x, long n) {
    Rational p = 1;
    for (long k = 0; k < n; ++k) p *= x;
    return p;
}

// Taylor partial sum of e^x with a Lagrange remainder bound; e^xi <= 3^ceil(x)
// for xi <= x.
inline Exact exp_bounds(const Rational& x, long terms = 60) {
    Rational sum = 0;
    Rational term = 1;
    for (long k = 0; k < terms; ++k) {
        sum += term;
        term *= x;
        term /= k + 1;
    }
    Rational rem = abs(term);
    const double xd = x.get_d();
    for (long k = 0; k < static_cast<long>(std::ceil(xd)); ++k) rem *= 3;
    return {sum - rem, sum + rem};
}

// sin (cosine = false) or cos of x with remainder |x|^N/N!.
inline Exact sin_cos_bounds(const Rational& x, bool cosine, long terms = 80) {
    Rational sum = 0;
    for (long k = cosine ? 0 : 1; k < terms; k += 2) {
        Rational t = power(x, k) / factorial(k);
        if ((k / 2) % 2 == 1) t = -t;
        sum += t;
    }
    const Rational rem = power(abs(x), terms) / factorial(terms);
    return {sum - rem, sum + rem};
}

inline double ulp_down(double x) { return std::nextafter(x, -INFINITY); }
inline double ulp_up(double x) { return std::nextafter(x, INFINITY); }

}  // namespace support
