// Exact rational scalar for the combinatorial verification paths.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "symten/common.hpp"

namespace symten {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational abs_val(const Rational& x) { return x < 0 ? Rational(-x) : x; }

template <>
struct scalar_traits<Rational> {
    static Rational from_int(long long v) { return Rational(v); }
    static Rational from_ratio(long long num, long long den) {
        return Rational(num) / Rational(den);
    }
    static double to_double(const Rational& v) { return v.convert_to<double>(); }
    static bool is_zero(const Rational& v) { return v == 0; }
};

// n!! with the convention (-1)!! = 0!! = 1.
inline BigInt double_factorial(long long n) {
    if (n < -1) throw std::invalid_argument("double_factorial: argument below -1");
    BigInt r = 1;
    for (long long t = n; t >= 2; t -= 2) r *= t;
    return r;
}

inline BigInt big_factorial(long long n) {
    if (n < 0) throw std::invalid_argument("big_factorial: negative argument");
    BigInt r = 1;
    for (long long t = 2; t <= n; ++t) r *= t;
    return r;
}

} // namespace symten
