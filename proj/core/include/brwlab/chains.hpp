#ifndef BRWLAB_CHAINS_HPP
#define BRWLAB_CHAINS_HPP

#include <cstdint>
#include <vector>

#include "brwlab/rational.hpp"

namespace brwlab {

// Quotient (lumped) chains on symmetry classes.  Lumping a walk over the
// orbits of origin-fixing automorphisms preserves return probabilities
// exactly and turns horizon-4000 series into cheap dense DP.

struct LumpedChain {
    std::int32_t start = 0;
    // log transition probabilities; rows_exact is filled when the state count
    // is small enough for exact arithmetic to be worthwhile
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows_log;
    std::vector<std::vector<std::pair<std::int32_t, Rational>>> rows_exact;
    std::vector<std::int64_t> level;  // graph distance of the class from the origin
    std::vector<double> log_size;     // log of the class (orbit) cardinality
    std::vector<double> log_pi;       // log reversing-measure mass of the class

    std::size_t size() const { return rows_log.size(); }
    bool has_exact() const { return !rows_exact.empty(); }
};

// Distance-from-origin chain of the (optionally lazy) simple walk on T_d:
// from distance r >= 1 the walk moves in with probability (1-stay)/d and out
// with probability (1-stay)(d-1)/d.
LumpedChain tree_distance_chain(int degree, const Rational& stay, int max_dist);

// Signed positions -max_dist..max_dist on the line; right probability p.
LumpedChain line_position_chain(const Rational& p_right, const Rational& stay, int max_dist);

// Hammock classes (tree generation g) and (spine index k); valid because
// root-fixing automorphisms of the 4-ary tree act transitively on each
// generation and fix the spine pointwise.
LumpedChain hammock_level_chain(const Rational& stay, int max_level);

// Chains of graphs glued at their origins: state 0 is the shared origin, the
// parts keep their own classes.  Weights are the parts' basepoint-degree
// shares; each part's reversing measure is rescaled so the seam satisfies
// detailed balance.
LumpedChain glued_chain(const std::vector<std::pair<LumpedChain, Rational>>& parts);

// Classes of T_d relative to two marked vertices at distance D: a vertex is
// classified by (t, l) where t is the point of the geodesic its branch hangs
// off and l the branch depth.  Orbits of automorphisms fixing both marks.
struct TwoCenterChain {
    LumpedChain chain;
    int D = 0;
    int max_l = 0;
    std::int32_t start_a = 0;  // class of the first marked vertex
    std::int32_t start_b = 0;  // class of the second
    std::int32_t index(int t, int l) const;
};
TwoCenterChain two_center_tree_chain(int degree, int D, int max_l);

// Return-probability series of the chain: log P(X_n = start) for n = 0..N.
std::vector<double> chain_return_log(const LumpedChain& chain, int N);
std::vector<Rational> chain_return_exact(const LumpedChain& chain, int N);

// Full per-step distribution vectors in linear domain (indexed [step][state]).
std::vector<std::vector<double>> chain_step_vectors(const LumpedChain& chain, std::int32_t start,
                                                    int N);

struct PowerIterResult {
    double value = 0;
    double delta = 0;  // last Rayleigh-quotient change
    bool converged = false;
    int iterations = 0;
    std::size_t states = 0;
};

// Largest eigenvalue of the chain restricted to classes with level <= radius
// (absorbing boundary), via power iteration on the pi-symmetrised operator.
PowerIterResult dirichlet_power_iteration(const LumpedChain& chain, std::int64_t radius,
                                          int max_iters, double tol);

// Same, for an arbitrary sparse nonnegative operator given in CSR-ish form
// (used for kernels with no quotient chain).
PowerIterResult dirichlet_power_iteration_csr(const std::vector<std::vector<std::pair<std::int32_t, double>>>& rows,
                                              const std::vector<double>& log_pi, int max_iters,
                                              double tol);

} // namespace brwlab

#endif
