#ifndef BRWLAB_SERIES_HPP
#define BRWLAB_SERIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "brwlab/chains.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/sparse_dp.hpp"

namespace brwlab {

enum class ArithmeticMode { Float, Rational };

// Which computation route produced a series.
enum class SeriesStrategy {
    Auto,
    DistanceChain,
    HammockChain,
    GluedChain,
    ProductConvolution,
    LazyMix,
    SparseDP,
};

// Exact return probabilities p_n = P_origin(X_n = origin), n = 0..N, kept in
// the log domain (rational mode also keeps the exact values).
struct ReturnSeries {
    VertexAddr origin;
    int period = 1;
    ArithmeticMode mode = ArithmeticMode::Float;
    std::string strategy;
    std::vector<double> logp;
    std::vector<Rational> exact;  // rational mode only

    int max_n() const { return static_cast<int>(logp.size()) - 1; }
    double p(int n) const;
    double log_p(int n) const { return logp[static_cast<std::size_t>(n)]; }
    bool positive(int n) const;
};

struct SeriesOptions {
    ArithmeticMode mode = ArithmeticMode::Float;
    SeriesStrategy strategy = SeriesStrategy::Auto;
    std::size_t support_cap = 4'000'000;
};

// Chooses the cheapest exact route: distance chains for (lazy) walks on T_d
// and the line, the (type, level) chain for the hammock, step-allocation
// convolution over factor series for product kernels, a lazy binomial mix on
// top of any of those, and sparse vertex DP otherwise.  The sparse DP prunes
// states beyond distance N/2, which is exact for returns up to horizon N.
ReturnSeries return_series(const Kernel& kernel, int N, SeriesOptions opts = {});

// n-step distribution from `start` as a sparse vector (exact, double).
DistVector<double> sparse_distribution(const Kernel& kernel, const VertexAddr& start, int steps,
                                       const SparseDpLimits& limits);
DistVector<Rational> sparse_distribution_exact(const Kernel& kernel, const VertexAddr& start,
                                               int steps, const SparseDpLimits& limits);

// Peels nested lazy layers: any Lazy^j(base) equals stay*I + (1-stay)*base.
struct LazyPeel {
    Rational stay;
    KernelSpec base;
};
LazyPeel peel_lazy(const KernelSpec& spec);

// The lumped chain of the kernel over origin-fixing symmetry orbits, when
// one exists: distance classes on trees and lines, (type, level) classes on
// the hammock, grids of factor classes on products, parts glued at state 0.
std::optional<LumpedChain> quotient_chain(const Kernel& kernel, int max_level);

const char* strategy_name(SeriesStrategy s);

} // namespace brwlab

#endif
