#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace atp {

// Arbitrary-precision rational. Every exponent in a derivation is one of these.
using Rational = mpq_class;

// Accepts "p/q", "p", and plain decimals such as "1.28" or "-3e-2".
// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& value);

// Decimal rendering, rounded to at most `max_digits` fractional digits with
// trailing zeros trimmed. Exact whenever the expansion terminates in time.
std::string to_decimal(const Rational& value, int max_digits = 10);

// Exact value of a finite double.
Rational from_double(double value);

double to_double(const Rational& value);

// Simplest rational (smallest denominator) within `tolerance` of `value`,
// with the denominator capped at `max_denominator`.
Rational rationalize(double value, double tolerance, const mpz_class& max_denominator);

// Bits needed for the larger of numerator and denominator.
std::size_t bit_length(const Rational& value);

inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }

}  // namespace atp
