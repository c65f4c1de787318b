#include "brwlab/brw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "brwlab/parallel.hpp"
#include "brwlab/series.hpp"

namespace brwlab {

namespace {

OffspringDist validate_mu(const OffspringDist& mu) {
    if (mu.support.empty()) throw ConfigError("offspring law has empty support");
    double sum = 0, mean = 0;
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        if (mu.support[i] <= 0) throw ConfigError("offspring law must have mu(0) = 0");
        if (mu.probs[i] <= 0) throw ConfigError("offspring probabilities must be positive");
        sum += mu.probs[i];
        mean += mu.support[i] * mu.probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("offspring probabilities must sum to 1");
    if (std::abs(mean - mu.mean) > 1e-12) throw ConfigError("offspring mean mismatch");
    return mu;
}

// total offspring of c particles: for the two-point law on {a, a+1} this is
// a*c + Binomial(c, q); otherwise a multinomial over the support
std::uint64_t total_offspring(const OffspringDist& mu, std::uint64_t c, std::mt19937_64& eng) {
    if (mu.support.size() == 1) return static_cast<std::uint64_t>(mu.support[0]) * c;
    if (mu.support.size() == 2 && mu.support[1] == mu.support[0] + 1) {
        std::binomial_distribution<std::uint64_t> bin(c, mu.probs[1]);
        return static_cast<std::uint64_t>(mu.support[0]) * c + bin(eng);
    }
    std::uint64_t total = 0;
    std::uint64_t left = c;
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < mu.support.size() && left > 0; ++i) {
        std::binomial_distribution<std::uint64_t> bin(left, mu.probs[i] / rest);
        std::uint64_t k = bin(eng);
        total += static_cast<std::uint64_t>(mu.support[i]) * k;
        left -= k;
        rest -= mu.probs[i];
    }
    total += static_cast<std::uint64_t>(mu.support.back()) * left;
    return total;
}

} // namespace

OffspringDist make_offspring(const std::vector<std::pair<int, double>>& entries) {
    OffspringDist mu;
    double mean = 0;
    for (const auto& [k, p] : entries) {
        if (p == 0) continue;
        mu.support.push_back(k);
        mu.probs.push_back(p);
        mean += k * p;
    }
    mu.mean = mean;
    return validate_mu(mu);
}

OffspringDist critical_offspring(const Real50& rho, double scale) {
    if (rho <= 0 || rho >= 1)
        throw DomainError("critical offspring needs rho in (0,1); no supercritical mean exists");
    Real50 mean = Real50(scale) / rho;
    if (mean <= 1) throw DomainError("offspring mean must exceed 1");
    auto lo = static_cast<std::int64_t>(floor(mean).convert_to<double>());
    double frac = (mean - lo).convert_to<double>();
    OffspringDist mu;
    if (frac < 1e-15) {
        mu.support = {static_cast<int>(lo)};
        mu.probs = {1.0};
        mu.mean = static_cast<double>(lo);
        return mu;
    }
    mu.support = {static_cast<int>(lo), static_cast<int>(lo) + 1};
    mu.probs = {1.0 - frac, frac};
    mu.mean = lo + frac;
    return mu;
}

BrwEngine::BrwEngine(const Kernel& kernel, const OffspringDist& mu)
    : kernel_(kernel), mu_(mu) {}

GenerationState BrwEngine::advance(
    const GenerationState& cur, std::mt19937_64& eng,
    const std::function<void(const VertexAddr&, const VertexAddr&, std::uint64_t)>& observer)
    const {
    std::unordered_map<VertexAddr, std::uint64_t, AddrHash> next;
    next.reserve(cur.counts.size() * 2 + 8);
    std::vector<std::pair<VertexAddr, std::uint64_t>> dispatch;
    for (const auto& [v, c] : cur.counts) {
        std::uint64_t kids = total_offspring(mu_, c, eng);
        if (kids == 0) continue;
        dispatch.clear();
        kernel_.sample_step_counts(v, kids, eng, dispatch);
        for (const auto& [u, cnt] : dispatch) {
            next[u] += cnt;
            if (observer) observer(v, u, cnt);
        }
    }
    GenerationState out;
    out.generation = cur.generation + 1;
    out.counts.assign(next.begin(), next.end());
    std::sort(out.counts.begin(), out.counts.end());
    for (const auto& [v, c] : out.counts) out.total += c;
    return out;
}

TraceRecord simulate_brw(const RunConfig& cfg) {
    if (cfg.generations < 0) throw ConfigError("generation budget must be >= 0");
    Kernel kernel = build_kernel(cfg.kernel, cfg.graph);
    BrwEngine engine(kernel, cfg.offspring);

    TraceRecord trace;
    trace.start = cfg.start.value_or(origin(cfg.graph));
    validate_address(cfg.graph, trace.start);

    GenerationState state;
    state.generation = 0;
    state.counts.emplace_back(trace.start, 1);
    state.total = 1;
    trace.first_visit.emplace(trace.start, 0);
    if (cfg.retain == Retention::All) trace.states.push_back(state);

    std::function<void(const VertexAddr&, const VertexAddr&, std::uint64_t)> observer;
    int generation = 0;
    if (cfg.record_trace) {
        observer = [&](const VertexAddr& from, const VertexAddr& to, std::uint64_t) {
            trace.first_visit.emplace(to, generation + 1);
            if (from != to) {
                UndirectedEdge e = from < to ? UndirectedEdge{from, to} : UndirectedEdge{to, from};
                trace.edges.insert(std::move(e));
            }
        };
    }

    for (generation = 0; generation < cfg.generations; ++generation) {
        auto eng = make_engine(cfg.seed, cfg.replication, static_cast<std::uint64_t>(generation));
        state = engine.advance(state, eng, observer);
        if (state.total > cfg.population_cap) {
            trace.generations_done = generation + 1;
            trace.truncated = true;
            trace.final_state = std::move(state);
            throw BrwTruncated("population cap exceeded at generation " +
                                   std::to_string(generation + 1),
                               std::move(trace));
        }
        if (cfg.retain == Retention::All) trace.states.push_back(state);
    }
    trace.generations_done = cfg.generations;
    trace.final_state = std::move(state);
    return trace;
}

ManyToOneResult many_to_one_check(const RunConfig& cfg, int n, const VertexAddr& target,
                                  std::uint64_t replications) {
    if (replications < 2) throw ConfigError("many-to-one needs at least 2 replications");
    Kernel kernel = build_kernel(cfg.kernel, cfg.graph);
    VertexAddr start = cfg.start.value_or(origin(cfg.graph));
    validate_address(cfg.graph, target);

    SparseDpLimits limits;
    limits.radius_cap = n + 1;
    auto dist = sparse_distribution(kernel, start, n, limits);
    double point = mass_at(dist, target);
    double exact = std::pow(cfg.offspring.mean, n) * point;

    std::vector<double> counts(replications, 0.0);
    parallel_over(replications, [&](std::size_t rep) {
        GenerationState state;
        state.generation = 0;
        state.counts.emplace_back(start, 1);
        state.total = 1;
        BrwEngine engine(kernel, cfg.offspring);
        for (int g = 0; g < n; ++g) {
            auto eng = make_engine(cfg.seed, cfg.replication + rep, static_cast<std::uint64_t>(g));
            state = engine.advance(state, eng, nullptr);
        }
        for (const auto& [v, c] : state.counts)
            if (v == target) counts[rep] = static_cast<double>(c);
    });

    ManyToOneResult res;
    res.replications = replications;
    res.exact = exact;
    double sum = 0;
    for (double c : counts) sum += c;
    res.mc_mean = sum / double(replications);
    double ss = 0;
    for (double c : counts) ss += (c - res.mc_mean) * (c - res.mc_mean);
    double var = ss / double(replications - 1);
    res.se = std::sqrt(var / double(replications));
    if (exact == 0.0 && res.mc_mean > 0.0)
        throw InternalConsistencyError("particles observed at a zero-probability site");
    res.z = res.se > 0 ? (res.mc_mean - exact) / res.se : (res.mc_mean == exact ? 0.0 : INFINITY);
    return res;
}

} // namespace brwlab
