#include "rigor/rational.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>

#include "rigor/error.hpp"

namespace rigor {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::optional<Rational> parse_fraction(std::string_view text) {
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
        negative = num.front() == '-';
        num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class p(std::string(num), 10);
    mpz_class q(std::string(den), 10);
    if (q == 0) return std::nullopt;
    Rational r(p, q);
    r.canonicalize();
    if (negative) r = -r;
    return r;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    if (text.find('/') != std::string_view::npos) return parse_fraction(text);

    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::string_view mantissa = text;
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = text.substr(0, e);
        std::string_view exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 6) return std::nullopt;
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
    }

    std::string digits;
    long fraction_digits = 0;
    bool seen_point = false;
    for (char c : mantissa) {
        if (c == '.') {
            if (seen_point) return std::nullopt;
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) ++fraction_digits;
        } else {
            return std::nullopt;
        }
    }
    if (digits.empty()) return std::nullopt;

    mpz_class value(digits, 10);
    const long scale = exponent - fraction_digits;
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational r = scale < 0 ? Rational(value, power) : Rational(value * power);
    r.canonicalize();
    if (negative) r = -r;
    return r;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

std::optional<std::string> to_decimal_string(const Rational& q) {
    mpz_class den = q.get_den();
    unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
    unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
    if (den != 1) return std::nullopt;

    const unsigned long places = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
    mpz_class scaled = q.get_num() * scale / q.get_den();
    const bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.get_str(10);
    if (places > 0) {
        if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
        digits.insert(digits.size() - places, 1, '.');
    }
    return negative ? "-" + digits : digits;
}

Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw InvalidEndpoints("non-finite binary64 value");
    return Rational(x);
}

namespace {

// n / 2^s with |n| <= 2^53 and moderate s converts to binary64 exactly;
// returns the value in that case.
std::optional<double> short_dyadic(const Rational& q) {
    const mpz_srcptr num = q.get_num_mpz_t();
    const mpz_srcptr den = q.get_den_mpz_t();
    const auto shift = mpz_scan1(den, 0);
    if (shift > 960 || mpz_sizeinbase(den, 2) != shift + 1 || !mpz_fits_slong_p(num)) return std::nullopt;
    const long n = mpz_get_si(num);
    constexpr long limit = 1L << 53;
    if (n > limit || n < -limit) return std::nullopt;
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(1023 - shift) << 52);
    return static_cast<double>(n) * scale;
}

}  // namespace

double round_to_double(const Rational& q, Rounding dir) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // mpq_get_d truncates toward zero.
    if (const auto exact = short_dyadic(q)) return *exact == 0.0 ? 0.0 : *exact;
    const double d = q.get_d();
    if (!std::isfinite(d)) throw Overflow("rational value outside the binary64 range");
    const int c = cmp(Rational(d), q);
    double r = d;
    if (c < 0 && dir == Rounding::up) r = std::nextafter(d, inf);
    if (c > 0 && dir == Rounding::down) r = std::nextafter(d, -inf);
    if (!std::isfinite(r)) throw Overflow("rational value outside the binary64 range");
    return r;
}

bool is_double_representable(const Rational& q) {
    if (short_dyadic(q)) return true;
    const double d = q.get_d();
    return std::isfinite(d) && Rational(d) == q;
}

Rational pow2(long exponent) {
    mpz_class p = 1;
    if (exponent >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
        return Rational(p);
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
    return Rational(mpz_class(1), p);
}

Rational floor_to_grid(const Rational& q, long bits) {
    mpz_class scaled = q.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    Rational r(scaled, 1);
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(bits));
    return r;
}

Rational ceil_to_grid(const Rational& q, long bits) {
    mpz_class scaled = q.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    mpz_cdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    Rational r(scaled, 1);
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(bits));
    return r;
}

long log2_estimate(const Rational& q) {
    if (q == 0) return 0;
    const long num_bits = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
    const long den_bits = static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
    return num_bits - den_bits;
}

std::optional<double> exact_double(const Rational& q) {
    if (const auto exact = short_dyadic(q)) return exact;
    return is_double_representable(q) ? std::optional<double>(q.get_d()) : std::nullopt;
}

double approx(const Rational& q) {
    if (const auto exact = short_dyadic(q)) return *exact;
    return q.get_d();
}

}  // namespace rigor
