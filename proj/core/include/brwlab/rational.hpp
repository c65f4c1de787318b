#ifndef BRWLAB_RATIONAL_HPP
#define BRWLAB_RATIONAL_HPP

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "brwlab/errors.hpp"

namespace brwlab {

// Exact arithmetic used by the rational run mode and by small-horizon
// cross-checks.  Real50 carries closed-form spectral radii at ~50 digits.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Real50 = boost::multiprecision::cpp_bin_float_50;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Real50& x) { return x.convert_to<double>(); }

inline BigInt binomial_exact(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (unsigned i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

// Parses "3", "-2", "3/7" or a decimal like "0.25" into an exact rational.
Rational rational_from_string(const std::string& text);

std::string rational_to_string(const Rational& q);

} // namespace brwlab

#endif
