#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace volterra {

// Exact rational arithmetic for combinatorial coefficients. Factorials of
// k <= 10 and moment products would overflow fixed-width integers, so all
// identities are computed over arbitrary precision and converted to double
// only at the boundary.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt b = 1;
    for (unsigned i = 0; i < k; ++i) {
        b *= (n - i);
        b /= (i + 1);
    }
    return b;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace volterra
