#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace modsym {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Integer& n) { return n.convert_to<double>(); }
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Floor division (quotient rounded toward -infinity), any signs.
inline Integer fdiv(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Integer fmod_pos(const Integer& a, const Integer& b) {
    Integer r = a % b;
    if (r < 0) r += abs(b);
    return r;
}

// log of a positive integer, exact to ~1ulp even far beyond double range.
inline double log_integer(const Integer& n) {
    if (n <= 0) throw std::domain_error("log_integer: nonpositive argument");
    if (n < (Integer(1) << 62)) return std::log(n.convert_to<double>());
    const std::size_t bits = msb(n);  // position of highest set bit
    const Integer top = n >> (bits - 52);
    return std::log(top.convert_to<double>()) + static_cast<double>(bits - 52) * M_LN2;
}

inline double log_rational(const Rational& r) {
    if (r <= 0) throw std::domain_error("log_rational: nonpositive argument");
    return log_integer(numerator(r)) - log_integer(denominator(r));
}

// Extended gcd: returns g = gcd(a,b) and x,y with a*x + b*y = g.
struct ExtGcd {
    Integer g, x, y;
};

inline ExtGcd ext_gcd(Integer a, Integer b) {
    Integer x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Integer q = a / b;
        Integer t = a - q * b; a = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
        t = y0 - q * y1; y0 = y1; y1 = t;
    }
    if (a < 0) { a = -a; x0 = -x0; y0 = -y0; }
    return {a, x0, y0};
}

// Nearest integer to a rational, ties rounded up.
inline Integer round_rational(const Rational& r) {
    const Integer n = numerator(r), d = denominator(r);  // d > 0
    return fdiv(2 * n + d, 2 * d);
}

inline Integer floor_rational(const Rational& r) {
    return fdiv(numerator(r), denominator(r));
}

}  // namespace modsym
