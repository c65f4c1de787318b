#ifndef BRWLAB_BRW_HPP
#define BRWLAB_BRW_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "brwlab/kernel.hpp"
#include "brwlab/offspring.hpp"
#include "brwlab/rng.hpp"

namespace brwlab {

// Vertex-aggregated branching random walk: generation states hold particle
// counts per occupied vertex, and offspring are dispatched multinomially.
// Exchangeability makes this distributionally identical to per-particle
// simulation while supporting populations in the 1e5-1e6 range.

struct GenerationState {
    int generation = 0;
    std::vector<std::pair<VertexAddr, std::uint64_t>> counts;  // sorted by address
    std::uint64_t total = 0;
};

enum class Retention { None, Final, All };

struct UndirectedEdge {
    VertexAddr a, b;  // a <= b
    bool operator==(const UndirectedEdge&) const = default;
};

struct EdgeHash {
    std::size_t operator()(const UndirectedEdge& e) const {
        return hash_value(e.a) * 1000003u ^ hash_value(e.b);
    }
};

struct TraceRecord {
    VertexAddr start;
    std::unordered_map<VertexAddr, int, AddrHash> first_visit;  // vertex -> generation
    std::unordered_set<UndirectedEdge, EdgeHash> edges;         // traversed, no self-loops
    std::vector<GenerationState> states;                        // per retention policy
    GenerationState final_state;
    int generations_done = 0;
    bool truncated = false;

    bool visited(const VertexAddr& v) const { return first_visit.count(v) > 0; }
};

struct RunConfig {
    GraphFamily graph;
    KernelSpec kernel;
    OffspringDist offspring;
    int generations = 1;
    std::uint64_t seed = 1;
    std::uint64_t replication = 0;
    std::uint64_t population_cap = 20'000'000;
    Retention retain = Retention::Final;
    bool record_trace = true;
    std::optional<VertexAddr> start;  // defaults to the graph origin
};

// Population-cap overruns surface as a ResourceError carrying the partial
// trace and the generation reached.
struct BrwTruncated : ResourceError {
    TraceRecord partial;
    BrwTruncated(std::string msg, TraceRecord t)
        : ResourceError(std::move(msg)), partial(std::move(t)) {}
};

class BrwEngine {
public:
    BrwEngine(const Kernel& kernel, const OffspringDist& mu);

    // One synchronous generation: every particle dies, leaves offspring, and
    // each offspring takes one kernel step.  Edges are reported through the
    // observer (self-loops from lazy mass visit the vertex but add no edge).
    GenerationState advance(const GenerationState& cur, std::mt19937_64& eng,
                            const std::function<void(const VertexAddr&, const VertexAddr&,
                                                     std::uint64_t)>& observer) const;

private:
    const Kernel& kernel_;
    const OffspringDist& mu_;
};

TraceRecord simulate_brw(const RunConfig& cfg);

struct ManyToOneResult {
    double mc_mean = 0;
    double exact = 0;
    double se = 0;
    double z = 0;
    std::uint64_t replications = 0;
};

// Monte Carlo mean of the particle count at `target` at generation n against
// the exact first-moment value mean(mu)^n P(X_n = target).
ManyToOneResult many_to_one_check(const RunConfig& cfg, int n, const VertexAddr& target,
                                  std::uint64_t replications);

} // namespace brwlab

#endif
