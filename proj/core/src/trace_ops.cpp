#include "brwlab/trace_ops.hpp"

#include <algorithm>
#include <cmath>

#include "brwlab/parallel.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/unionfind.hpp"

namespace brwlab {

EndsProfile ends_profile(const GraphFamily& g, const TraceRecord& trace,
                         const std::vector<std::int64_t>& radii) {
    EndsProfile profile;
    profile.budget = trace.generations_done;
    for (std::int64_t r : radii) {
        std::unordered_map<VertexAddr, std::size_t, AddrHash> index;
        for (const auto& [v, gen] : trace.first_visit) {
            if (ball_distance(g, v) > r) index.emplace(v, index.size());
        }
        UnionFind uf(index.size());
        for (const auto& e : trace.edges) {
            auto ia = index.find(e.a);
            auto ib = index.find(e.b);
            if (ia != index.end() && ib != index.end()) uf.merge(ia->second, ib->second);
        }
        std::vector<std::size_t> roots;
        for (const auto& [v, c] : trace.final_state.counts) {
            auto it = index.find(v);
            if (it != index.end()) roots.push_back(uf.find(it->second));
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        profile.counts.emplace_back(r, roots.size());
    }
    return profile;
}

ColoredTrace purple_experiment(const GraphFamily& g, const KernelSpec& kernel,
                               const OffspringDist& mu, const VertexAddr& source_red,
                               const VertexAddr& source_blue, int budget, std::uint64_t seed) {
    ColoredTrace out;
    auto run = [&](const VertexAddr& src, std::uint64_t tag) -> TraceRecord {
        RunConfig cfg;
        cfg.graph = g;
        cfg.kernel = kernel;
        cfg.offspring = mu;
        cfg.generations = budget;
        cfg.seed = substream(seed, tag);
        cfg.retain = Retention::None;
        cfg.start = src;
        try {
            return simulate_brw(cfg);
        } catch (BrwTruncated& t) {
            out.truncated = true;
            return std::move(t.partial);
        }
    };
    TraceRecord red = run(source_red, 0xed);
    TraceRecord blue = run(source_blue, 0xb1);

    out.purple_by_horizon.assign(static_cast<std::size_t>(budget) + 1, 0);
    for (const auto& [v, rg] : red.first_visit) {
        auto it = blue.first_visit.find(v);
        if (it == blue.first_visit.end()) continue;
        int h = std::max(rg, it->second);
        if (h <= budget) ++out.purple_by_horizon[static_cast<std::size_t>(h)];
    }
    std::uint64_t acc = 0;
    for (auto& c : out.purple_by_horizon) {
        acc += c;
        c = acc;
    }
    out.purple_total = acc;
    out.red_first = std::move(red.first_visit);
    out.blue_first = std::move(blue.first_visit);
    return out;
}

FiberHitStats fiber_hit_stats(const GraphFamily& g, const TraceRecord& trace,
                              const VertexAddr& fiber) {
    const auto* prod = std::get_if<Product>(&g.g);
    if (!prod || prod->factors.size() != 2 || !std::holds_alternative<Line>(prod->factors[1].g))
        throw ConfigError("fiber statistics need a product-with-line graph");
    validate_address(prod->factors[0], fiber);
    if (trace.states.empty())
        throw ResourceError("fiber statistics need full state retention (states discarded)");
    FiberHitStats stats;
    stats.fiber = fiber;
    for (const auto& state : trace.states) {
        bool hit = false;
        for (const auto& [v, c] : state.counts) {
            const auto& pa = std::get<ProductAddr>(v.v);
            if (pa.factors[0] == fiber) {
                hit = true;
                break;
            }
        }
        if (hit) {
            stats.hit_generations.push_back(state.generation);
            stats.last_hit = state.generation;
        }
    }
    return stats;
}

int min_supercritical_lag(const Rational& bias_p, const ReturnSeries& lazy_series) {
    if (bias_p == Rational(1, 2))
        throw DomainError("no supercritical lag is guaranteed at p = 1/2 (equal radii)");
    if (bias_p <= 0 || bias_p >= 1) throw DomainError("bias must lie in (0,1)");
    // rho of the half-tree half-biased-line product walk
    Real50 p(bias_p);
    Real50 rho = sqrt(Real50(2)) / 3 + sqrt(p * (1 - p));
    double log_rho = static_cast<double>(log(rho));
    for (int k = 1; k <= lazy_series.max_n(); ++k) {
        if (!lazy_series.positive(k)) continue;
        if (lazy_series.log_p(k) > k * log_rho) return k;
    }
    throw InsufficientDataError("no crossing found; extend the lazy series horizon");
}

bool ZeroSet::contains(const VertexAddr& v) const {
    const auto* pa = std::get_if<ProductAddr>(&v.v);
    if (!pa || pa->factors.size() != 2) return false;
    if (kind == Kind::LineFiber) return pa->factors[0] == anchor;
    const auto* w = std::get_if<TreeWord>(&pa->factors[0].v);
    return w && spine_label(*w).has_value() && pa->factors[1] == anchor;
}

EmbeddedGwStats embedded_gw_stats(const EmbeddedGwConfig& cfg) {
    if (cfg.lag < 1) throw ConfigError("embedded process needs a lag >= 1");
    if (cfg.budget < cfg.lag) throw ConfigError("budget must cover at least one lag");
    Kernel kernel = build_kernel(cfg.kernel, cfg.graph);
    BrwEngine engine(kernel, cfg.mu);
    VertexAddr start = origin(cfg.graph);

    int flag_from = cfg.budget / 4;
    std::uint64_t R = cfg.replications;
    std::vector<std::vector<std::uint64_t>> trajectories(R);
    std::vector<char> ok(R, 0);

    parallel_over(R, [&](std::size_t rep) {
        // phase 1: run the base process until a particle sits in Z_0
        GenerationState state;
        state.counts.emplace_back(start, 1);
        state.total = 1;
        int flag_gen = -1;
        VertexAddr flag_pos;
        auto scan = [&](const GenerationState& s) -> bool {
            for (const auto& [v, c] : s.counts) {
                if (cfg.z0.contains(v)) {
                    flag_pos = v;
                    return true;
                }
            }
            return false;
        };
        if (flag_from == 0 && cfg.z0.contains(start)) {
            flag_gen = 0;
            flag_pos = start;
        }
        for (int g = 0; flag_gen < 0 && g < cfg.budget - cfg.lag; ++g) {
            auto eng = make_engine(cfg.seed, rep, static_cast<std::uint64_t>(g));
            state = engine.advance(state, eng, nullptr);
            if (state.total > cfg.population_cap) return;  // cap: counts as failed
            if (state.generation >= flag_from && scan(state)) flag_gen = state.generation;
        }
        if (flag_gen < 0) return;

        // phase 2: follow the flagged particle's descendants in Z_0 at lag
        // multiples; each survivor set restarts as a fresh process (branching
        // property), so only the embedded counts are carried between lags
        GenerationState embedded;
        embedded.counts.emplace_back(flag_pos, 1);
        embedded.total = 1;
        int max_lags = std::min(cfg.lags, (cfg.budget - flag_gen) / cfg.lag);
        std::vector<std::uint64_t> ys;
        std::uint64_t phase2_seed = substream(cfg.seed, 0x65);
        std::uint64_t gen_counter = 0;
        for (int j = 1; j <= max_lags; ++j) {
            GenerationState cur = embedded;
            for (int g = 0; g < cfg.lag; ++g) {
                auto eng = make_engine(phase2_seed, rep, gen_counter++);
                cur = engine.advance(cur, eng, nullptr);
                if (cur.total > cfg.population_cap) return;
            }
            GenerationState next;
            next.generation = 0;
            for (const auto& [v, c] : cur.counts) {
                if (cfg.z0.contains(v)) {
                    next.counts.emplace_back(v, c);
                    next.total += c;
                }
            }
            ys.push_back(next.total);
            if (next.total == 0) break;
            embedded = std::move(next);
        }
        if (ys.empty()) return;
        trajectories[rep] = std::move(ys);
        ok[rep] = 1;
    });

    EmbeddedGwStats stats;
    stats.lag = cfg.lag;
    stats.reference = cfg.reference;
    stats.replications = R;
    std::vector<double> y1s;
    std::uint64_t survived = 0, judged = 0;
    for (std::size_t rep = 0; rep < R; ++rep) {
        if (!ok[rep]) {
            ++stats.failed;
            continue;
        }
        const auto& ys = trajectories[rep];
        y1s.push_back(static_cast<double>(ys.front()));
        ++judged;
        bool alive = std::all_of(ys.begin(), ys.end(), [](std::uint64_t y) { return y >= 1; });
        if (alive) ++survived;
        stats.trajectories.push_back(ys);
    }
    if (y1s.empty()) throw ResourceError("no replication produced a flagged particle in Z_0");
    double sum = 0;
    for (double y : y1s) sum += y;
    stats.mean_y1 = sum / double(y1s.size());
    double ss = 0;
    for (double y : y1s) ss += (y - stats.mean_y1) * (y - stats.mean_y1);
    stats.se_y1 = std::sqrt(ss / double(y1s.size() - 1) / double(y1s.size()));
    stats.z = (cfg.reference > 0 && stats.se_y1 > 0)
                  ? (stats.mean_y1 - cfg.reference) / stats.se_y1
                  : 0.0;
    stats.q_hat = judged > 0 ? double(survived) / double(judged) : 0.0;
    if (judged > 0) {
        double se = std::sqrt(stats.q_hat * (1 - stats.q_hat) / double(judged));
        stats.q_ci_lo = std::max(0.0, stats.q_hat - 2.576 * se);
        stats.q_ci_hi = std::min(1.0, stats.q_hat + 2.576 * se);
    }
    return stats;
}

} // namespace brwlab
