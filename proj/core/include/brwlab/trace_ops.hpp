#ifndef BRWLAB_TRACE_OPS_HPP
#define BRWLAB_TRACE_OPS_HPP

#include <cstdint>
#include <vector>

#include "brwlab/brw.hpp"
#include "brwlab/series.hpp"

namespace brwlab {

// Finite-budget end counting: after deleting the radius-r ball, the number of
// connected components of the remaining trace that contain a final-generation
// particle.  Components are over traversed edges only (dead stubs without
// live particles are not counted).
struct EndsProfile {
    std::vector<std::pair<std::int64_t, std::size_t>> counts;  // (radius, components)
    int budget = 0;
};

EndsProfile ends_profile(const GraphFamily& g, const TraceRecord& trace,
                         const std::vector<std::int64_t>& radii);

// Two independent processes coloured red and blue; purple = red AND blue.
struct ColoredTrace {
    std::unordered_map<VertexAddr, int, AddrHash> red_first, blue_first;
    std::vector<std::uint64_t> purple_by_horizon;  // cumulative count per generation
    std::uint64_t purple_total = 0;
    bool truncated = false;
};

ColoredTrace purple_experiment(const GraphFamily& g, const KernelSpec& kernel,
                               const OffspringDist& mu, const VertexAddr& source_red,
                               const VertexAddr& source_blue, int budget, std::uint64_t seed);

// Occupancy of one line fiber {v} x Z of a product-with-line trace.  Needs a
// run with full state retention.
struct FiberHitStats {
    VertexAddr fiber;  // the fixed non-line coordinate
    std::vector<int> hit_generations;
    int last_hit = -1;  // -1: never hit
};

FiberHitStats fiber_hit_stats(const GraphFamily& g, const TraceRecord& trace,
                              const VertexAddr& fiber);

// Minimal k >= 1 with p_k > rho^k, where p is the lazy tree return series and
// rho the spectral radius of the biased product walk; exists for p != 1/2
// because the lazy walk has the larger radius.
int min_supercritical_lag(const Rational& bias_p, const ReturnSeries& lazy_series);

// The designated line copy Z_0 the embedded process is read off of.
struct ZeroSet {
    enum class Kind { LineFiber, SpineCopy } kind = Kind::LineFiber;
    VertexAddr anchor;  // LineFiber: the fixed first coordinate; SpineCopy: the fixed second one

    bool contains(const VertexAddr& v) const;
};

struct EmbeddedGwStats {
    int lag = 0;
    double reference = 0;  // rho^-k p_k
    double mean_y1 = 0;
    double se_y1 = 0;
    double z = 0;
    double q_hat = 0;      // fraction of replications with all observed Y_j >= 1
    double q_ci_lo = 0, q_ci_hi = 0;  // 99% normal-approximation interval
    std::uint64_t replications = 0;
    std::uint64_t failed = 0;  // replications where no particle entered Z_0 in the window
    std::vector<std::vector<std::uint64_t>> trajectories;  // Y_1.. per successful replication
};

struct EmbeddedGwConfig {
    GraphFamily graph;
    KernelSpec kernel;
    OffspringDist mu;
    ZeroSet z0;
    int lag = 0;  // from min_supercritical_lag
    int budget = 0;
    int lags = 1;  // how many multiples of the lag to follow
    std::uint64_t replications = 1000;
    std::uint64_t seed = 1;
    std::uint64_t population_cap = 20'000'000;
    double reference = 0;  // rho^-k p_k; 0 when no closed form is available
};

// Flags the first particle (canonical order) occupying Z_0 after generation
// budget/4, then follows the counts of its descendants inside Z_0 at lag
// multiples.  Descendant subtrees are restarted as fresh processes from the
// flagged positions, which the branching property makes distributionally
// exact.
EmbeddedGwStats embedded_gw_stats(const EmbeddedGwConfig& cfg);

} // namespace brwlab

#endif
