#include <doctest.h>

#include <cmath>
#include <map>

#include "brwlab/brw.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/unionfind.hpp"

using namespace brwlab;

namespace {

constexpr double kRhoT3 = 0.9428090415820634;
constexpr double kRhoT3Z = 0.9714045207910317;

RunConfig t3z_critical(int generations, std::uint64_t seed) {
    RunConfig cfg;
    cfg.graph = product({hom_tree(3), line()});
    cfg.kernel = product_kernel({{simple_kernel(), Rational(1, 2)}, {simple_kernel(), Rational(1, 2)}});
    cfg.offspring = critical_offspring(*analytic_rho(cfg.kernel, cfg.graph));
    cfg.generations = generations;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("critical offspring laws pin the mean at scale/rho") {
    auto mu1 = critical_offspring(Real50(kRhoT3Z));
    REQUIRE(mu1.support == std::vector<int>{1, 2});
    CHECK(mu1.probs[1] == doctest::Approx(1.0 / kRhoT3Z - 1.0).epsilon(1e-12));
    CHECK(mu1.probs[1] == doctest::Approx(0.0294334).epsilon(1e-5));
    CHECK(mu1.mean == doctest::Approx(1.0 / kRhoT3Z).epsilon(1e-12));

    auto mu2 = critical_offspring(Real50(kRhoT3));
    CHECK(mu2.probs[1] == doctest::Approx(3.0 / (2 * std::sqrt(2.0)) - 1.0).epsilon(1e-12));
    CHECK(mu2.probs[1] == doctest::Approx(0.0606602).epsilon(1e-5));

    // 1/rho right at an integer: the law degenerates
    auto mu3 = critical_offspring(Real50(1) / 2);
    CHECK(mu3.support == std::vector<int>{2});
    CHECK(mu3.mean == 2.0);

    CHECK_THROWS_AS(critical_offspring(Real50(1)), DomainError);
    CHECK_THROWS_AS(critical_offspring(Real50("1.2")), DomainError);
}

TEST_CASE("offspring laws reject zero offspring and bad sums") {
    CHECK_THROWS_AS(make_offspring({{0, 0.5}, {1, 0.5}}), ConfigError);
    CHECK_THROWS_AS(make_offspring({{1, 0.5}, {2, 0.4}}), ConfigError);
    auto mu = make_offspring({{1, 0.25}, {3, 0.75}});
    CHECK(mu.mean == doctest::Approx(2.5));
}

TEST_CASE("a degenerate offspring law is a plain random walk") {
    RunConfig cfg;
    cfg.graph = line();
    cfg.kernel = simple_kernel();
    cfg.offspring = make_offspring({{1, 1.0}});
    cfg.generations = 50;
    cfg.seed = 7;
    auto trace = simulate_brw(cfg);
    CHECK(trace.final_state.total == 1);
    // the trace is a path: every generation has exactly one particle
    CHECK(trace.edges.size() + 1 >= trace.first_visit.size());
}

TEST_CASE("generation zero is a single particle at the origin") {
    auto cfg = t3z_critical(0, 1);
    auto trace = simulate_brw(cfg);
    CHECK(trace.final_state.total == 1);
    CHECK(trace.final_state.counts.front().first == origin(cfg.graph));
    CHECK(trace.edges.empty());
}

TEST_CASE("population is nondecreasing and never dies out") {
    auto cfg = t3z_critical(40, 3);
    cfg.retain = Retention::All;
    auto trace = simulate_brw(cfg);
    std::uint64_t prev = 1;
    for (const auto& s : trace.states) {
        CHECK(s.total >= prev);
        CHECK(s.total > 0);
        prev = s.total;
    }
}

TEST_CASE("population mean tracks m^n (martingale first moment)") {
    struct Case {
        RunConfig cfg;
        double m;
    };
    std::vector<Case> cases;
    {
        auto cfg = t3z_critical(12, 11);
        cases.push_back({cfg, cfg.offspring.mean});
    }
    {
        RunConfig cfg;
        cfg.graph = hammock();
        cfg.kernel = simple_kernel();
        cfg.offspring = make_offspring({{1, 0.9}, {2, 0.1}});
        cfg.generations = 12;
        cfg.seed = 12;
        cases.push_back({cfg, 1.1});
    }
    {
        RunConfig cfg;
        cfg.graph = product({hom_tree(3), hom_tree(3)});
        cfg.kernel =
            product_kernel({{simple_kernel(), Rational(1, 2)}, {simple_kernel(), Rational(1, 2)}});
        cfg.offspring = critical_offspring(Real50(kRhoT3));
        cfg.generations = 12;
        cfg.seed = 13;
        cases.push_back({cfg, cfg.offspring.mean});
    }
    for (auto& c : cases) {
        const std::size_t reps = 4000;
        std::vector<double> w(reps);
        double mn = std::pow(c.m, c.cfg.generations);
        parallel_over(reps, [&](std::size_t rep) {
            RunConfig cfg = c.cfg;
            cfg.replication = rep;
            cfg.record_trace = false;
            cfg.retain = Retention::Final;
            auto trace = simulate_brw(cfg);
            w[rep] = double(trace.final_state.total) / mn;
        });
        double mean = 0;
        for (double x : w) mean += x;
        mean /= double(reps);
        double var = 0;
        for (double x : w) var += (x - mean) * (x - mean);
        var /= double(reps - 1);
        double se = std::sqrt(var / double(reps));
        CHECK(std::abs(mean - 1.0) <= 4 * se + 1e-9);
    }
}

TEST_CASE("traces are connected") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        auto cfg = t3z_critical(40, seed);
        auto trace = simulate_brw(cfg);
        std::unordered_map<VertexAddr, std::size_t, AddrHash> index;
        for (const auto& [v, g] : trace.first_visit) index.emplace(v, index.size());
        UnionFind uf(index.size());
        for (const auto& e : trace.edges) uf.merge(index.at(e.a), index.at(e.b));
        // lazy self-steps add no edges, so only count vertices reached by moves
        CHECK(uf.components() == 1);
    }
}

TEST_CASE("population cap raises a truncation carrying the partial trace") {
    RunConfig cfg;
    cfg.graph = line();
    cfg.kernel = simple_kernel();
    cfg.offspring = make_offspring({{2, 1.0}});
    cfg.generations = 30;
    cfg.population_cap = 100;
    cfg.seed = 5;
    try {
        simulate_brw(cfg);
        FAIL("expected truncation");
    } catch (const BrwTruncated& t) {
        CHECK(t.partial.truncated);
        CHECK(t.partial.generations_done < 30);
        CHECK(t.partial.final_state.total > 100);
    }
}

TEST_CASE("identical seeds give identical runs") {
    auto a = simulate_brw(t3z_critical(25, 99));
    auto b = simulate_brw(t3z_critical(25, 99));
    CHECK(a.final_state.counts == b.final_state.counts);
    CHECK(a.edges.size() == b.edges.size());
    auto c = simulate_brw(t3z_critical(25, 100));
    CHECK(a.final_state.counts != c.final_state.counts);
}

// --------------------------------------------------------------------------
// Vertex aggregation vs a per-particle reference, against the exact law.

namespace {

using StateKey = std::string;

StateKey key_of(const std::map<std::int64_t, std::uint64_t>& positions) {
    std::string k;
    for (const auto& [z, c] : positions) k += std::to_string(z) + "x" + std::to_string(c) + ";";
    return k;
}

// exact distribution of the aggregated state after `gens` generations of the
// two-point law {1,2} on the line, by full enumeration
void enumerate_exact(std::map<std::int64_t, std::uint64_t> state, int gens, double prob,
                     std::map<StateKey, double>& law) {
    if (prob < 1e-16) return;
    if (gens == 0) {
        law[key_of(state)] += prob;
        return;
    }
    // expand one particle at a time: particles behave independently, so we
    // recurse over per-particle (offspring, steps) outcomes
    std::vector<std::int64_t> particles;
    for (const auto& [z, c] : state)
        for (std::uint64_t i = 0; i < c; ++i) particles.push_back(z);

    std::function<void(std::size_t, std::map<std::int64_t, std::uint64_t>, double)> expand =
        [&](std::size_t idx, std::map<std::int64_t, std::uint64_t> next, double p) {
            if (idx == particles.size()) {
                enumerate_exact(std::move(next), gens - 1, prob * p, law);
                return;
            }
            std::int64_t z = particles[idx];
            for (int kids = 1; kids <= 2; ++kids) {
                double pk = 0.5;
                // each child steps left or right with probability 1/2
                for (int mask = 0; mask < (1 << kids); ++mask) {
                    auto n2 = next;
                    for (int c = 0; c < kids; ++c) n2[z + ((mask >> c) & 1 ? 1 : -1)] += 1;
                    expand(idx + 1, std::move(n2), p * pk / double(1 << kids));
                }
            }
        };
    expand(0, {}, 1.0);
}

} // namespace

TEST_CASE("aggregated stepping reproduces the exact generation-state law") {
    std::map<StateKey, double> exact;
    enumerate_exact({{0, 1}}, 3, 1.0, exact);
    double total = 0;
    for (const auto& [k, p] : exact) total += p;
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));

    RunConfig cfg;
    cfg.graph = line();
    cfg.kernel = simple_kernel();
    cfg.offspring = make_offspring({{1, 0.5}, {2, 0.5}});
    cfg.generations = 3;
    cfg.record_trace = false;

    const std::size_t reps = 400000;
    std::vector<StateKey> keys(reps);
    parallel_over(reps, [&](std::size_t rep) {
        RunConfig rc = cfg;
        rc.seed = 2024;
        rc.replication = rep;
        auto trace = simulate_brw(rc);
        std::map<std::int64_t, std::uint64_t> st;
        for (const auto& [v, c] : trace.final_state.counts) st[std::get<LineInt>(v.v).z] = c;
        keys[rep] = key_of(st);
    });
    std::map<StateKey, double> empirical;
    for (const auto& k : keys) empirical[k] += 1.0 / double(reps);

    double tv = 0;
    for (const auto& [k, p] : exact) {
        auto it = empirical.find(k);
        tv += std::abs((it == empirical.end() ? 0.0 : it->second) - p);
    }
    for (const auto& [k, p] : empirical)
        if (!exact.count(k)) tv += p;
    tv /= 2;
    CHECK(tv < 0.02);

    // per-particle reference simulator, same target law
    std::vector<StateKey> naive(reps / 4);
    parallel_over(naive.size(), [&](std::size_t rep) {
        std::mt19937_64 eng = make_engine(4242, rep, 0);
        std::vector<std::int64_t> particles{0};
        std::bernoulli_distribution branch(0.5), step(0.5);
        for (int g = 0; g < 3; ++g) {
            std::vector<std::int64_t> next;
            for (auto z : particles) {
                int kids = branch(eng) ? 2 : 1;
                for (int c = 0; c < kids; ++c) next.push_back(z + (step(eng) ? 1 : -1));
            }
            particles = std::move(next);
        }
        std::map<std::int64_t, std::uint64_t> st;
        for (auto z : particles) st[z] += 1;
        naive[rep] = key_of(st);
    });
    std::map<StateKey, double> nemp;
    for (const auto& k : naive) nemp[k] += 1.0 / double(naive.size());
    double tv2 = 0;
    for (const auto& [k, p] : exact) {
        auto it = nemp.find(k);
        tv2 += std::abs((it == nemp.end() ? 0.0 : it->second) - p);
    }
    for (const auto& [k, p] : nemp)
        if (!exact.count(k)) tv2 += p;
    tv2 /= 2;
    CHECK(tv2 < 0.04);
}

// --------------------------------------------------------------------------
// First-moment identity.

TEST_CASE("expected count at the start is one at time zero") {
    auto cfg = t3z_critical(1, 21);
    auto res = many_to_one_check(cfg, 0, origin(cfg.graph), 100);
    CHECK(res.exact == 1.0);
    CHECK(res.mc_mean == 1.0);
    CHECK(res.z == 0.0);
}

TEST_CASE("doubling walk on the line: one expected particle at +1 after a step") {
    RunConfig cfg;
    cfg.graph = line();
    cfg.kernel = simple_kernel();
    cfg.offspring = make_offspring({{2, 1.0}});
    cfg.seed = 8;
    auto res = many_to_one_check(cfg, 1, VertexAddr(LineInt{1}), 40000);
    CHECK(res.exact == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(res.z) <= 4.0);
}

TEST_CASE("first-moment identity on the critical product at six steps") {
    auto cfg = t3z_critical(6, 31);
    auto res = many_to_one_check(cfg, 6, origin(cfg.graph), 20000);
    CHECK(res.exact > 0);
    CHECK(std::abs(res.z) <= 4.0);
}

TEST_CASE("a particle observed at an unreachable site is an internal error") {
    RunConfig cfg;
    cfg.graph = line();
    cfg.kernel = simple_kernel();
    cfg.offspring = make_offspring({{1, 1.0}});
    cfg.seed = 9;
    // odd site at even time has probability zero; the check must not see mass
    auto res = many_to_one_check(cfg, 2, VertexAddr(LineInt{1}), 500);
    CHECK(res.exact == 0.0);
    CHECK(res.mc_mean == 0.0);
}
