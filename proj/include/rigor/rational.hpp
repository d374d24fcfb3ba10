#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace rigor {

using Rational = mpq_class;

enum class Rounding { down, up };

// Parses a decimal literal ("12", "-0.25", "1.5e-3") or a fraction ("3/8")
// into its exact rational value. Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

// Exact decimal expansion when the value has a terminating one.
std::optional<std::string> to_decimal_string(const Rational& q);

Rational exact_rational(double x);

// Nearest binary64 in the requested direction. Throws Overflow when the value
// is beyond the finite range.
double round_to_double(const Rational& q, Rounding dir);

bool is_double_representable(const Rational& q);

Rational pow2(long exponent);

// Outward rounding onto the grid of multiples of 2^-bits.
Rational floor_to_grid(const Rational& q, long bits);
Rational ceil_to_grid(const Rational& q, long bits);

// floor(log2|q|) up to +-1; 0 for q == 0.
long log2_estimate(const Rational& q);

// Binary64 value of q truncated toward zero (exact when representable);
// monotone in q.
double approx(const Rational& q);

// q as a binary64 when that is exact.
std::optional<double> exact_double(const Rational& q);

}  // namespace rigor
