#include "rigor/backend.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <limits>

#include "rigor/error.hpp"

namespace rigor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude FMA residuals may themselves be rounded, so the
// direction of the error is no longer known exactly.
constexpr double kResidualFloor = 0x1p-960;

double checked(double x) {
    if (!std::isfinite(x)) throw Overflow("binary64 overflow");
    return x == 0.0 ? 0.0 : x;
}

// Adjacent binary64 in the given direction, for finite r.
double neighbour(double r, Rounding dir) {
    if (r == 0.0) {
        const double tiny = std::numeric_limits<double>::denorm_min();
        return dir == Rounding::up ? tiny : -tiny;
    }
    auto bits = std::bit_cast<std::uint64_t>(r);
    const bool away = (r > 0) == (dir == Rounding::up);
    bits = away ? bits + 1 : bits - 1;
    return std::bit_cast<double>(bits);
}

// Rounds the nearest result r given the sign of (exact - r).
double direct(double r, int error_sign, Rounding dir) {
    if (dir == Rounding::up && error_sign > 0) return checked(neighbour(r, dir));
    if (dir == Rounding::down && error_sign < 0) return checked(neighbour(r, dir));
    return checked(r);
}

double step_outward(double r, Rounding dir) { return checked(neighbour(r, dir)); }

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

bool F64::valid(double x) { return std::isfinite(x); }

double F64::add(double a, double b, Rounding dir) {
    const double s = a + b;
    if (!std::isfinite(s)) throw Overflow("binary64 overflow in addition");
    const double bb = s - a;
    // TwoSum: the error term is exact whenever s is finite.
    const double err = (a - (s - bb)) + (b - bb);
    return direct(s, sign(err), dir);
}

double F64::sub(double a, double b, Rounding dir) { return add(a, -b, dir); }

double F64::mul(double a, double b, Rounding dir) {
    if (a == 0.0 || b == 0.0) return 0.0;
    const double p = a * b;
    if (!std::isfinite(p)) throw Overflow("binary64 overflow in multiplication");
    if (std::fabs(p) < kResidualFloor) return step_outward(p, dir);
    return direct(p, sign(std::fma(a, b, -p)), dir);
}

double F64::div(double a, double b, Rounding dir) {
    if (b == 0.0) throw DivisionByZeroInterval();
    if (a == 0.0) return 0.0;
    const double q = a / b;
    if (!std::isfinite(q)) throw Overflow("binary64 overflow in division");
    if (std::fabs(q) < kResidualFloor || std::fabs(a) < kResidualFloor) return step_outward(q, dir);
    // a - q*b is exact here; sign(a/b - q) = sign(a - q*b) * sign(b).
    const double rem = std::fma(-q, b, a);
    return direct(q, sign(rem) * sign(b), dir);
}

double F64::sqrt(double x, Rounding dir, double) {
    if (x < 0.0) throw DomainError("sqrt of a negative number");
    if (x == 0.0) return 0.0;
    const double s = std::sqrt(x);
    if (x < kResidualFloor) {
        const double r = step_outward(s, dir);
        return r < 0.0 ? 0.0 : r;
    }
    return direct(s, sign(std::fma(-s, s, x)), dir);
}

double F64::abs(double x) { return std::fabs(x); }

double F64::scale2(double x, int e) { return checked(std::ldexp(x, e)); }

double F64::midpoint(double lo, double hi) {
    double m = lo / 2 + hi / 2;
    if (m < lo) m = lo;
    if (m > hi) m = hi;
    return m == 0.0 ? 0.0 : m;
}

std::optional<double> F64::interior_point(double lo, double hi) {
    const double m = midpoint(lo, hi);
    if (lo < m && m < hi) return m;
    const double next = std::nextafter(lo, kInf);
    if (next < hi) return next == 0.0 ? 0.0 : next;
    return std::nullopt;
}

std::string F64::to_string(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string F64::to_hex(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(x), std::chars_format::hex);
    std::string out = std::signbit(x) ? "-0x" : "0x";
    out.append(buf, res.ptr);
    return out;
}

Rational Rat::sqrt(const Rational& x, Rounding dir, const Rational& tol) {
    if (x < 0) throw DomainError("sqrt of a negative number");
    if (x == 0) return Rational(0);
    if (mpz_perfect_square_p(x.get_num_mpz_t()) && mpz_perfect_square_p(x.get_den_mpz_t())) {
        mpz_class num, den;
        mpz_sqrt(num.get_mpz_t(), x.get_num_mpz_t());
        mpz_sqrt(den.get_mpz_t(), x.get_den_mpz_t());
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    long bits = 4;
    if (tol > 0) bits = std::max(4L, 2 - log2_estimate(tol));
    // floor(sqrt(x * 4^bits)) == isqrt(floor(x * 4^bits))
    mpz_class scaled = x.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(2 * bits));
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), x.get_den_mpz_t());
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    if (dir == Rounding::up) root += 1;
    return Rational(root) * pow2(-bits);
}

std::optional<BackendKind> parse_backend(std::string_view name) {
    if (name == "f64") return BackendKind::f64;
    if (name == "rat") return BackendKind::rat;
    return std::nullopt;
}

}  // namespace rigor
