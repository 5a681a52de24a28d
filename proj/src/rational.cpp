#include "ewens/rational.hpp"

#include "ewens/errors.hpp"

#include <cmath>
#include <cstdio>

namespace ewens {

namespace {

Int parse_integer(std::string_view text) {
    if (text.empty()) throw DomainError("empty integer literal");
    try {
        return Int(std::string(text));
    } catch (const std::exception&) {
        throw DomainError("not an integer: '" + std::string(text) + "'");
    }
}

}  // namespace

Rational parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Int num = parse_integer(text.substr(0, slash));
        Int den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view head = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty()) return Rational(parse_integer(head));
        bool negative = !head.empty() && head.front() == '-';
        if (head == "-" || head.empty()) head = "0";
        Int scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Int whole = parse_integer(head);
        Int digits = parse_integer(frac);
        if (digits < 0) throw DomainError("malformed decimal '" + std::string(text) + "'");
        Rational value = Rational(abs(whole) * scale + digits, scale);
        return negative ? -value : value;
    }
    return Rational(parse_integer(text));
}

std::string format_rational(const Rational& value) {
    std::string s = numerator(value).str();
    if (denominator(value) != 1) {
        s += '/';
        s += denominator(value).str();
    }
    return s;
}

std::string format_decimal(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double to_double(const Rational& value) {
    return value.convert_to<double>();
}

double log_rational(const Rational& value) {
    if (value <= 0) throw DomainError("log of nonpositive rational");
    auto log_int = [](const Int& x) {
        unsigned bits = msb(x);  // x >= 1 here
        if (bits <= 512) return std::log(x.convert_to<double>());
        Int mant = x >> (bits - 512);
        return std::log(mant.convert_to<double>()) + double(bits - 512) * std::log(2.0);
    };
    return log_int(numerator(value)) - log_int(denominator(value));
}

Rational pow_rational(const Rational& base, long long exponent) {
    if (exponent == 0) return Rational(1);
    if (base == 0 && exponent < 0) throw DomainError("zero base with negative exponent");
    unsigned long long mag = exponent < 0 ? -(unsigned long long)exponent : (unsigned long long)exponent;
    Int num = pow(numerator(base), (unsigned)mag);
    Int den = pow(denominator(base), (unsigned)mag);
    return exponent > 0 ? Rational(num, den) : Rational(den, num);
}

Int factorial(unsigned n) {
    Int r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace ewens
