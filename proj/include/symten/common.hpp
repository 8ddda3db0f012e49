// Shared small utilities: binomial tables, factorials, scalar traits.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <cmath>

namespace symten {

// Binomial coefficient with the combinatorial conventions used throughout:
// C(i,j) = 0 whenever j < 0, i < 0, or i < j.
inline long long binom(long long i, long long j) {
    if (j < 0 || i < 0 || i < j) return 0;
    if (j > i - j) j = i - j;
    long long r = 1;
    for (long long t = 1; t <= j; ++t) {
        r = r * (i - j + t) / t;  // exact: product of t consecutive ints divisible by t!
    }
    return r;
}

inline long long factorial(int k) {
    if (k < 0) throw std::invalid_argument("factorial: negative argument");
    long long r = 1;
    for (int t = 2; t <= k; ++t) r *= t;
    return r;
}

// Scalar traits: the library is templated on the scalar ring. double is the
// default; an exact rational type can be plugged in for the combinatorial
// paths. A scalar type must support +,-,*,/ and construction from long long.
template <class T>
struct scalar_traits {
    static T from_int(long long v) { return T(v); }
    static T from_ratio(long long num, long long den) { return T(num) / T(den); }
    static double to_double(const T& v) { return static_cast<double>(v); }
    static bool is_zero(const T& v) { return v == T(0); }
};

template <class T>
inline T scalar_ratio(long long num, long long den) {
    return scalar_traits<T>::from_ratio(num, den);
}

inline double abs_val(double x) { return std::fabs(x); }

} // namespace symten
