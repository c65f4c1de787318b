#ifndef BRWLAB_LOGSUM_HPP
#define BRWLAB_LOGSUM_HPP

#include <cmath>
#include <limits>

namespace brwlab {

// Log-domain arithmetic for long-horizon probability series.  A probability
// p is stored as log(p), with -inf representing zero mass.

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool log_is_zero(double lx) { return lx == kLogZero; }

inline double log_add(double la, double lb) {
    if (log_is_zero(la)) return lb;
    if (log_is_zero(lb)) return la;
    if (la < lb) std::swap(la, lb);
    return la + std::log1p(std::exp(lb - la));
}

// log C(n, k) via lgamma; exact enough for convolution weights at any n.
inline double log_binomial(double n, double k) {
    if (k < 0 || k > n) return kLogZero;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace brwlab

#endif
