#pragma once

#include <algorithm>
#include <concepts>
#include <optional>
#include <ostream>
#include <utility>

#include "rigor/backend.hpp"
#include "rigor/error.hpp"

namespace rigor {

// Tag for constructing an interval whose endpoints are already known to be
// ordered; only finiteness is checked.
struct Ordered {};
inline constexpr Ordered ordered{};

// Three-valued outcome of a machine branch predicate.
enum class Tri { yes, no, undefined };

/// Closed interval [lo, hi] with endpoints representable in backend B.
///
/// lo <= hi always holds; a degenerate interval [x, x] stands for the
/// number x. Values are immutable.
template <class B>
class Interval {
public:
    using Backend = B;
    using Scalar = typename B::scalar;

    Interval() : lo_(B::from_int(0)), hi_(B::from_int(0)) {}

    explicit Interval(Scalar point) : lo_(point), hi_(lo_) {
        if (!B::valid(lo_)) throw InvalidEndpoints("non-finite endpoint");
    }

    // Endpoints are constructed in place from the arguments; on Rat this
    // saves the allocation a rational move costs.
    template <class L, class H>
        requires std::constructible_from<Scalar, L&&> && std::constructible_from<Scalar, H&&>
    Interval(L&& lo, H&& hi) : lo_(std::forward<L>(lo)), hi_(std::forward<H>(hi)) {
        if (!B::valid(lo_) || !B::valid(hi_)) throw InvalidEndpoints("non-finite endpoint");
        if (hi_ < lo_) throw InvalidEndpoints("lower endpoint exceeds upper endpoint");
    }

    template <class L, class H>
        requires std::constructible_from<Scalar, L&&> && std::constructible_from<Scalar, H&&>
    Interval(Ordered, L&& lo, H&& hi) : lo_(std::forward<L>(lo)), hi_(std::forward<H>(hi)) {
        if (!B::valid(lo_) || !B::valid(hi_)) throw InvalidEndpoints("non-finite endpoint");
    }

    const Scalar& lo() const noexcept { return lo_; }
    const Scalar& hi() const noexcept { return hi_; }

    bool is_degenerate() const { return lo_ == hi_; }
    bool contains(const Scalar& x) const { return lo_ <= x && x <= hi_; }
    bool contains_zero() const { return lo_ <= 0 && 0 <= hi_; }

    // Structural equality of endpoints (same as the eq predicate).
    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

    friend void swap(Interval& a, Interval& b) noexcept {
        using std::swap;
        swap(a.lo_, b.lo_);
        swap(a.hi_, b.hi_);
    }

private:
    Scalar lo_;
    Scalar hi_;
};

template <class B>
Interval<B> make_interval(typename B::scalar lo, typename B::scalar hi) {
    return Interval<B>(std::move(lo), std::move(hi));
}

// Tightest interval of backend B containing the rational q.
template <class B>
Interval<B> enclose(const Rational& q) {
    return Interval<B>(B::from_rational(q, Rounding::down), B::from_rational(q, Rounding::up));
}

// Tightest interval of backend B containing [lo, hi].
template <class B>
Interval<B> enclose(const Rational& lo, const Rational& hi) {
    return Interval<B>(B::from_rational(lo, Rounding::down), B::from_rational(hi, Rounding::up));
}

// ---- arithmetic --------------------------------------------------------

template <class B>
Interval<B> add(const Interval<B>& x, const Interval<B>& y) {
    return Interval<B>(ordered, B::add(x.lo(), y.lo(), Rounding::down), B::add(x.hi(), y.hi(), Rounding::up));
}

// [x.lo - y.hi, x.hi - y.lo], which contains every x - y.
template <class B>
Interval<B> sub(const Interval<B>& x, const Interval<B>& y) {
    return Interval<B>(ordered, B::sub(x.lo(), y.hi(), Rounding::down), B::sub(x.hi(), y.lo(), Rounding::up));
}

template <class B>
Interval<B> neg(const Interval<B>& x) {
    if constexpr (B::exact) {
        return Interval<B>(ordered, -x.hi(), -x.lo());
    } else {
        return Interval<B>(ordered, B::neg(x.hi()), B::neg(x.lo()));
    }
}

template <class B>
Interval<B> mul(const Interval<B>& x, const Interval<B>& y) {
    using S = typename B::scalar;
    const S* xs[2] = {&x.lo(), &x.hi()};
    const S* ys[2] = {&y.lo(), &y.hi()};
    S lo = B::mul(x.lo(), y.lo(), Rounding::down);
    S hi = B::mul(x.lo(), y.lo(), Rounding::up);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (i == 0 && j == 0) continue;
            S l = B::mul(*xs[i], *ys[j], Rounding::down);
            if (l < lo) lo = std::move(l);
            S h = B::mul(*xs[i], *ys[j], Rounding::up);
            if (hi < h) hi = std::move(h);
        }
    }
    return Interval<B>(std::move(lo), std::move(hi));
}

// Requires 0 not in y; the min/max over the four endpoint quotients.
template <class B>
Interval<B> div(const Interval<B>& x, const Interval<B>& y) {
    using S = typename B::scalar;
    if (y.contains_zero()) throw DivisionByZeroInterval();
    const S* xs[2] = {&x.lo(), &x.hi()};
    const S* ys[2] = {&y.lo(), &y.hi()};
    S lo = B::div(x.lo(), y.lo(), Rounding::down);
    S hi = B::div(x.lo(), y.lo(), Rounding::up);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (i == 0 && j == 0) continue;
            S l = B::div(*xs[i], *ys[j], Rounding::down);
            if (l < lo) lo = std::move(l);
            S h = B::div(*xs[i], *ys[j], Rounding::up);
            if (hi < h) hi = std::move(h);
        }
    }
    return Interval<B>(std::move(lo), std::move(hi));
}

template <class B>
Interval<B> operator+(const Interval<B>& x, const Interval<B>& y) { return add(x, y); }
template <class B>
Interval<B> operator-(const Interval<B>& x, const Interval<B>& y) { return sub(x, y); }
template <class B>
Interval<B> operator-(const Interval<B>& x) { return neg(x); }
template <class B>
Interval<B> operator*(const Interval<B>& x, const Interval<B>& y) { return mul(x, y); }
template <class B>
Interval<B> operator/(const Interval<B>& x, const Interval<B>& y) { return div(x, y); }

// x^n with parity-aware range rules: [-1,2]^2 = [0,4].
template <class B>
Interval<B> pow(const Interval<B>& x, unsigned n) {
    if (n == 0) return Interval<B>(B::from_int(1));
    auto point_power = [n](const typename B::scalar& v) {
        Interval<B> p(v);
        Interval<B> acc = p;
        for (unsigned k = 1; k < n; ++k) acc = mul(acc, p);
        return acc;
    };
    if (n % 2 == 1 || x.lo() >= 0) {
        return Interval<B>(point_power(x.lo()).lo(), point_power(x.hi()).hi());
    }
    if (x.hi() <= 0) {
        return Interval<B>(point_power(x.hi()).lo(), point_power(x.lo()).hi());
    }
    const typename B::scalar m = std::max(B::abs(x.lo()), B::abs(x.hi()));
    return Interval<B>(B::from_int(0), point_power(m).hi());
}

// x^n as n-1 plain interval products (no dependency tracking).
template <class B>
Interval<B> pow_naive(const Interval<B>& x, unsigned n) {
    if (n == 0) return Interval<B>(B::from_int(1));
    Interval<B> acc = x;
    for (unsigned k = 1; k < n; ++k) acc = mul(acc, x);
    return acc;
}

// ---- predicates --------------------------------------------------------

template <class B>
bool eq(const Interval<B>& x, const Interval<B>& y) { return x.lo() == y.lo() && x.hi() == y.hi(); }

// Every element of x is below every element of y. A partial order: lt(x, y)
// and lt(y, x) can both be false.
template <class B>
bool lt(const Interval<B>& x, const Interval<B>& y) { return x.hi() < y.lo(); }

template <class B>
bool le(const Interval<B>& x, const Interval<B>& y) { return x.hi() <= y.lo(); }

template <class B>
bool subset(const Interval<B>& x, const Interval<B>& y) { return y.lo() <= x.lo() && x.hi() <= y.hi(); }

// x lies in the interior of y (both endpoint inequalities strict).
template <class B>
bool interior_subset(const Interval<B>& x, const Interval<B>& y) { return y.lo() < x.lo() && x.hi() < y.hi(); }

// ---- unary basic operations ---------------------------------------------

template <class B>
Interval<B> left(const Interval<B>& x) { return Interval<B>(x.lo()); }

template <class B>
Interval<B> right(const Interval<B>& x) { return Interval<B>(x.hi()); }

// Degenerate [m, m] with m = max(|lo|, |hi|).
template <class B>
Interval<B> abs(const Interval<B>& x) { return Interval<B>(mag(x)); }

template <class B>
typename B::scalar mag(const Interval<B>& x) { return std::max(B::abs(x.lo()), B::abs(x.hi())); }

// ---- geometry -----------------------------------------------------------

template <class B>
Interval<B> hull(const Interval<B>& a, const Interval<B>& b) {
    return Interval<B>(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

// hi - lo rounded up.
template <class B>
typename B::scalar diam(const Interval<B>& x) { return B::sub(x.hi(), x.lo(), Rounding::up); }

template <class B>
typename B::scalar midpoint(const Interval<B>& x) { return B::midpoint(x.lo(), x.hi()); }

// Splits at a representable point strictly inside x.
template <class B>
std::pair<Interval<B>, Interval<B>> bisect(const Interval<B>& x) {
    if (x.is_degenerate()) throw NotBisectable("interval has zero diameter");
    auto m = B::interior_point(x.lo(), x.hi());
    if (!m) throw NotBisectable("no representable number strictly between the endpoints");
    return {Interval<B>(x.lo(), *m), Interval<B>(*m, x.hi())};
}

// Set intersection; nullopt stands for the empty set.
template <class B>
std::optional<Interval<B>> intersect(const Interval<B>& x, const Interval<B>& y) {
    const auto& lo = std::max(x.lo(), y.lo());
    const auto& hi = std::min(x.hi(), y.hi());
    if (hi < lo) return std::nullopt;
    return Interval<B>(lo, hi);
}

template <class B>
std::ostream& operator<<(std::ostream& os, const Interval<B>& x) {
    return os << '[' << B::to_string(x.lo()) << ", " << B::to_string(x.hi()) << ']';
}

using IntervalF64 = Interval<F64>;
using IntervalRat = Interval<Rat>;

}  // namespace rigor
