#pragma once

// Endpoint backends. Each backend is a stateless traits type exposing its
// scalar type and directed-rounding primitives; Interval<B> is written once
// against this surface.
//
//   F64  finite IEEE binary64, every primitive rounds in the requested
//        direction (tightest result outside the subnormal range)
//   Rat  GMP rationals, every primitive is exact

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "rigor/rational.hpp"

namespace rigor {

struct F64 {
    using scalar = double;
    static constexpr std::string_view name = "f64";
    static constexpr bool exact = false;

    static bool valid(double x);

    static double add(double a, double b, Rounding dir);
    static double sub(double a, double b, Rounding dir);
    static double mul(double a, double b, Rounding dir);
    static double div(double a, double b, Rounding dir);
    // tol is ignored: the result is the directed rounding of the true root.
    static double sqrt(double x, Rounding dir, double tol);

    static double neg(double x) { return x == 0.0 ? 0.0 : -x; }
    static double abs(double x);
    static double from_int(long n) { return static_cast<double>(n); }
    static double from_rational(const Rational& q, Rounding dir) { return round_to_double(q, dir); }
    static Rational to_rational(double x) { return exact_rational(x); }
    static double approx(double x) { return x; }
    // x * 2^e; exact for the moderate exponents the library uses.
    static double scale2(double x, int e);

    // Round-to-nearest of lo/2 + hi/2, clamped into [lo, hi].
    static double midpoint(double lo, double hi);
    // A representable number strictly between lo and hi, if one exists.
    static std::optional<double> interior_point(double lo, double hi);

    // Shortest decimal that reads back to the same binary64.
    static std::string to_string(double x);
    static std::string to_hex(double x);

    static void coarsen(double&, double&, long) {}
};

struct Rat {
    using scalar = Rational;
    static constexpr std::string_view name = "rat";
    static constexpr bool exact = true;

    static bool valid(const Rational&) { return true; }

    static Rational add(const Rational& a, const Rational& b, Rounding) { return a + b; }
    static Rational sub(const Rational& a, const Rational& b, Rounding) { return a - b; }
    static Rational mul(const Rational& a, const Rational& b, Rounding) { return a * b; }
    static Rational div(const Rational& a, const Rational& b, Rounding) { return a / b; }
    // Exact when x is the square of a rational; otherwise a bound on the
    // requested side within tol of the root.
    static Rational sqrt(const Rational& x, Rounding dir, const Rational& tol);

    static Rational neg(const Rational& x) { return -x; }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static Rational from_int(long n) { return Rational(n); }
    static Rational from_rational(const Rational& q, Rounding) { return q; }
    static Rational to_rational(const Rational& x) { return x; }
    static double approx(const Rational& x) { return rigor::approx(x); }
    static Rational scale2(const Rational& x, int e) { return x * pow2(e); }

    static Rational midpoint(const Rational& lo, const Rational& hi) {
        Rational m = lo + hi;
        m /= 2;
        return m;
    }
    static std::optional<Rational> interior_point(const Rational& lo, const Rational& hi) {
        if (lo < hi) return midpoint(lo, hi);
        return std::nullopt;
    }

    static std::string to_string(const Rational& x) { return rigor::to_string(x); }

    // Rounds [lo, hi] outward onto the grid of multiples of 2^-bits so that
    // long series evaluations keep small numerators and denominators.
    static void coarsen(Rational& lo, Rational& hi, long bits) {
        lo = floor_to_grid(lo, bits);
        hi = ceil_to_grid(hi, bits);
    }
};

enum class BackendKind { f64, rat };

std::optional<BackendKind> parse_backend(std::string_view name);

}  // namespace rigor
