#ifndef BRWLAB_SPARSE_DP_HPP
#define BRWLAB_SPARSE_DP_HPP

#include <cstddef>
#include <unordered_map>

#include "brwlab/errors.hpp"
#include "brwlab/graph.hpp"
#include "brwlab/kernel.hpp"

namespace brwlab {

// Sparse vertex-space dynamic programming over distribution vectors.  The
// state is a hash map vertex -> mass; one step pushes every entry through the
// kernel row.  Mass at vertices beyond `radius_cap` is dropped, which is
// exact for return probabilities to horizon N when radius_cap >= N/2 (a
// returning path of length m never leaves the ball of radius m/2).

template <class Value>
using DistVector = std::unordered_map<VertexAddr, Value, AddrHash>;

struct SparseDpLimits {
    std::size_t support_cap = 4'000'000;
    std::int64_t radius_cap = -1;  // -1: unbounded
};

template <class Value, class RowFn>
DistVector<Value> sparse_dp_step(const GraphFamily& g, const DistVector<Value>& cur,
                                 RowFn&& row_of, const SparseDpLimits& limits) {
    DistVector<Value> next;
    next.reserve(cur.size() * 2 + 16);
    for (const auto& [v, mass] : cur) {
        for (const auto& [u, p] : row_of(v)) {
            if (limits.radius_cap >= 0 && ball_distance(g, u) > limits.radius_cap) continue;
            next[u] += mass * p;
        }
        if (next.size() > limits.support_cap)
            throw ResourceError(
                "sparse DP support cap exceeded; use the Dirichlet estimator instead");
    }
    return next;
}

template <class Value>
Value mass_at(const DistVector<Value>& dist, const VertexAddr& v) {
    auto it = dist.find(v);
    return it == dist.end() ? Value(0) : it->second;
}

} // namespace brwlab

#endif
