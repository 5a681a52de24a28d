#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace ewens {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", "p", or a plain decimal like "2.5" into an exact rational.
// Throws DomainError on anything else (including q = 0).
Rational parse_rational(std::string_view text);

// "p/q" when the denominator is not 1, otherwise just "p".
std::string format_rational(const Rational& value);

// Shortest-ish decimal rendering (17 significant digits), stable across runs.
std::string format_decimal(double value);

double to_double(const Rational& value);

// Natural log of a positive rational; robust for values far outside the
// double range (works off the bit length of numerator and denominator).
double log_rational(const Rational& value);

// Exact integer power; exponent may be negative provided base != 0.
Rational pow_rational(const Rational& base, long long exponent);

Int factorial(unsigned n);

}  // namespace ewens
