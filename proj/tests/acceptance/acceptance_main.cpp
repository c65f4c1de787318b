// Acceptance suite: one check per numbered criterion, each printing a
// [PASS]/[FAIL] line with its measured quantities.  Exit status is the
// number of failing criteria.  Run a subset with --criterion N [N...].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brwlab/brw.hpp"
#include "brwlab/experiment.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/trace_ops.hpp"

using namespace brwlab;

namespace {

constexpr double kRhoT3 = 0.9428090415820634;   // 2 sqrt(2) / 3
constexpr double kRhoT3Z = 0.9714045207910317;  // sqrt(2)/3 + 1/2

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail += (ok ? "[ok] " : "[FAILED] ") + what + "; ";
    }
};

Kernel fair_product(std::vector<GraphFamily> factors) {
    std::vector<std::pair<KernelSpec, Rational>> parts;
    Rational w(1, static_cast<BigInt>(factors.size()));
    for (std::size_t i = 0; i < factors.size(); ++i) parts.emplace_back(simple_kernel(), w);
    GraphFamily g = product(std::move(factors));
    return Kernel(product_kernel(std::move(parts)), g);
}

KernelSpec biased_product_spec(const Rational& p) {
    return product_kernel(
        {{simple_kernel(), Rational(1, 2)}, {biased_line_kernel(p), Rational(1, 2)}});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------------- 1

Outcome criterion_spectral_radii() {
    Outcome out;
    struct Case {
        const char* name;
        Kernel kernel;
        double rho;
    };
    std::vector<Case> cases;
    cases.push_back({"t3", Kernel(simple_kernel(), hom_tree(3)), kRhoT3});
    cases.push_back({"t3 x z", fair_product({hom_tree(3), line()}), kRhoT3Z});
    cases.push_back({"t3 x t3", fair_product({hom_tree(3), hom_tree(3)}), kRhoT3});
    for (auto& c : cases) {
        auto t0 = std::chrono::steady_clock::now();
        auto series = return_series(c.kernel, 4000, SeriesOptions{});
        auto fit = fit_spectral(series, std::nullopt);
        double secs = seconds_since(t0);
        out.require(std::abs(fit.rho_hat - c.rho) < 1e-3,
                    std::string(c.name) + " rho_hat " + fmt(fit.rho_hat) + " vs " + fmt(c.rho));
        out.require(secs < 10.0, std::string(c.name) + " runtime " + fmt(secs) + "s < 10s");
    }
    return out;
}

// ---------------------------------------------------------------------- 2

Outcome criterion_exponents() {
    Outcome out;
    struct Case {
        const char* name;
        Kernel kernel;
        double lo, hi;
    };
    std::vector<Case> cases;
    cases.push_back({"t3 (3/2)", Kernel(simple_kernel(), hom_tree(3)), 1.4, 1.6});
    cases.push_back({"t3 x t3 (3)", fair_product({hom_tree(3), hom_tree(3)}), 2.85, 3.15});
    cases.push_back({"t3 x z (2)", fair_product({hom_tree(3), line()}), 1.9, 2.1});
    cases.push_back({"z (1/2)", Kernel(simple_kernel(), line()), 0.45, 0.55});
    for (auto& c : cases) {
        auto series = return_series(c.kernel, 4000, SeriesOptions{});
        auto fit = fit_spectral(series, std::nullopt);
        out.require(fit.a_hat >= c.lo && fit.a_hat <= c.hi,
                    std::string(c.name) + " a_hat " + fmt(fit.a_hat) + " in [" + fmt(c.lo) + "," +
                        fmt(c.hi) + "]");
    }
    return out;
}

// ---------------------------------------------------------------------- 3

Outcome criterion_sum_dichotomy() {
    Outcome out;
    {
        Kernel k = fair_product({hom_tree(3), hom_tree(3)});
        auto series = return_series(k, 4000, SeriesOptions{});
        auto rep = criticality_sum(series, kRhoT3, 4000);
        out.require(rep.verdict == Verdict::Converged,
                    std::string("t3 x t3 verdict ") + verdict_name(rep.verdict));
        out.require(rep.tail_estimate < 1e-6, "tail estimate " + fmt(rep.tail_estimate) + " < 1e-6");
    }
    {
        Kernel k = fair_product({hom_tree(3), line()});
        auto series = return_series(k, 4000, SeriesOptions{});
        auto rep = criticality_sum(series, kRhoT3Z, 4000);
        out.require(rep.verdict == Verdict::Diverging,
                    std::string("t3 x z verdict ") + verdict_name(rep.verdict));
        out.require(rep.r2 >= 0.99, "log-fit r2 " + fmt(rep.r2) + " >= 0.99");
    }
    return out;
}

// ---------------------------------------------------------------------- 4

Outcome criterion_two_walk_identity() {
    Outcome out;
    Kernel k = fair_product({hom_tree(3), hom_tree(3)});
    GraphFamily g = k.graph();
    auto diag = return_series(k, 200, SeriesOptions{});
    TwoWalkOptions opts;
    opts.diagonal = &diag;
    auto rep = two_walk_sum(k, origin(g), origin(g), 1.0 / kRhoT3, 200, opts);
    out.require(rep.max_rel_diag_gap.has_value(), "diagonal reference computed");
    if (rep.max_rel_diag_gap)
        out.require(*rep.max_rel_diag_gap < 1e-10,
                    "term-for-term relative gap " + fmt(*rep.max_rel_diag_gap) + " < 1e-10");
    return out;
}

// ---------------------------------------------------------------------- 5

Outcome criterion_many_to_one() {
    Outcome out;
    RunConfig cfg;
    cfg.graph = product({hom_tree(3), line()});
    cfg.kernel =
        product_kernel({{simple_kernel(), Rational(1, 2)}, {simple_kernel(), Rational(1, 2)}});
    cfg.offspring = critical_offspring(Real50(kRhoT3Z));
    cfg.seed = 271828;
    ProductAddr dist2;
    dist2.factors = {VertexAddr(make_word({0, 0})), VertexAddr(LineInt{0})};
    std::vector<std::pair<const char*, VertexAddr>> targets = {
        {"origin", origin(cfg.graph)}, {"(w:00,z:0)", VertexAddr(dist2)}};
    double worst = 0;
    for (int n = 1; n <= 8; ++n) {
        for (auto& [name, j] : targets) {
            cfg.replication = static_cast<std::uint64_t>(n) << 33;
            auto res = many_to_one_check(cfg, n, j, 100000);
            worst = std::max(worst, std::abs(res.z));
            if (std::abs(res.z) > 4.0)
                out.require(false, "n=" + std::to_string(n) + " j=" + name + " z=" + fmt(res.z));
        }
    }
    out.require(worst <= 4.0, "max |z| over n=1..8 and both targets = " + fmt(worst));
    return out;
}

// ---------------------------------------------------------------------- 6

Outcome criterion_exactness() {
    Outcome out;
    // frozen point values
    {
        SeriesOptions ropts;
        ropts.mode = ArithmeticMode::Rational;
        auto t3 = return_series(Kernel(simple_kernel(), hom_tree(3)), 8, ropts);
        out.require(t3.exact[2] == Rational(1, 3), "t3 p2 = 1/3");
        out.require(t3.exact[4] == Rational(5, 27), "t3 p4 = 5/27");
        auto hk = return_series(Kernel(simple_kernel(), hammock()), 30, ropts);
        out.require(hk.exact[2] == Rational(31, 210), "hammock p2 = 31/210");
        Rational bound = 1;
        bool lower_ok = true;
        for (int n = 1; n <= 15; ++n) {
            bound *= Rational(4, 35);
            lower_ok = lower_ok && (hk.exact[2 * n] >= bound);
        }
        out.require(lower_ok, "hammock p_{2n} >= (4/35)^n for n <= 15");
    }
    // quotient chains and convolutions against the raw sparse DP
    struct Case {
        const char* name;
        Kernel kernel;
    };
    std::vector<Case> rational_cases;
    rational_cases.push_back({"t3", Kernel(simple_kernel(), hom_tree(3))});
    rational_cases.push_back({"z", Kernel(simple_kernel(), line())});
    rational_cases.push_back({"t3 x z", fair_product({hom_tree(3), line()})});
    rational_cases.push_back({"t3 x t3", fair_product({hom_tree(3), hom_tree(3)})});
    for (auto& c : rational_cases) {
        SeriesOptions fast;
        fast.mode = ArithmeticMode::Rational;
        SeriesOptions raw = fast;
        raw.strategy = SeriesStrategy::SparseDP;
        auto a = return_series(c.kernel, 20, fast);
        auto b = return_series(c.kernel, 20, raw);
        bool equal = true;
        for (int n = 0; n <= 20; ++n) equal = equal && (a.exact[n] == b.exact[n]);
        out.require(equal, std::string(c.name) + " exact to n=20 (" + a.strategy + " vs sparse)");
    }
    {
        // the hammock ball at radius 10 is too large for exact arithmetic;
        // the cross-check runs in doubles at the stated 1e-12
        Kernel k(simple_kernel(), hammock());
        SeriesOptions raw;
        raw.strategy = SeriesStrategy::SparseDP;
        raw.support_cap = 6'000'000;
        auto a = return_series(k, 20, SeriesOptions{});
        auto b = return_series(k, 20, raw);
        double worst = 0;
        for (int n = 1; n <= 20; ++n) {
            double pa = a.positive(n) ? a.p(n) : 0.0;
            double pb = b.positive(n) ? b.p(n) : 0.0;
            worst = std::max(worst, std::abs(pa - pb));
        }
        out.require(worst < 1e-12, "hammock chain vs sparse DP to n=20, gap " + fmt(worst));
    }
    return out;
}

// ---------------------------------------------------------------------- 7

Outcome criterion_dirichlet() {
    Outcome out;
    Kernel t3(simple_kernel(), hom_tree(3));
    Kernel hk(simple_kernel(), hammock());
    double prev = -1, last_t3 = 0, last_h = 0;
    bool mono = true;
    for (std::int64_t R : {4, 8, 12, 16}) {
        double v = dirichlet_rho(t3, R).value;
        mono = mono && v >= prev;
        prev = v;
        last_t3 = v;
    }
    out.require(mono, "t3 ladder nondecreasing");
    prev = -1;
    mono = true;
    for (std::int64_t R : {4, 8, 12, 16}) {
        double v = dirichlet_rho(hk, R).value;
        mono = mono && v >= prev;
        prev = v;
        last_h = v;
    }
    out.require(mono, "hammock ladder nondecreasing");
    out.require(last_t3 >= 0.92 && last_t3 <= kRhoT3,
                "t3 rho_16 = " + fmt(last_t3) + " in [0.92, " + fmt(kRhoT3) + "]");
    out.require(last_h > 0.2 && last_h < 0.99, "hammock rho_16 = " + fmt(last_h) + " in (0.2, 0.99)");
    return out;
}

// ---------------------------------------------------------------------- 8

Outcome criterion_purple() {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    {
        GraphFamily g = product({hom_tree(3), hom_tree(3)});
        KernelSpec k =
            product_kernel({{simple_kernel(), Rational(1, 2)}, {simple_kernel(), Rational(1, 2)}});
        auto mu = critical_offspring(Real50(kRhoT3));
        ProductAddr far;
        far.factors = {VertexAddr(make_word({0, 0, 0, 0, 0})),
                       VertexAddr(make_word({0, 0, 0, 0, 0}))};
        const std::size_t reps = 50;
        std::vector<std::uint64_t> at20(reps), at30(reps);
        parallel_over(reps, [&](std::size_t rep) {
            auto ct =
                purple_experiment(g, k, mu, origin(g), VertexAddr(far), 30, mix_seed(8001, rep));
            at20[rep] = ct.purple_by_horizon[20];
            at30[rep] = ct.purple_by_horizon[30];
        });
        auto median = [](std::vector<std::uint64_t> v) {
            std::sort(v.begin(), v.end());
            return double(v[v.size() / 2]);
        };
        double m20 = median(at20), m30 = median(at30);
        out.require(m20 == m30, "t3 x t3 distance-10 purple medians: " + fmt(m20) + " at 20 vs " +
                                    fmt(m30) + " at 30");
    }
    {
        GraphFamily g = product({hom_tree(3), line()});
        KernelSpec k = biased_product_spec(Rational(7, 10));
        auto mu = critical_offspring(*analytic_rho(k, g));
        const std::size_t reps = 50;
        std::vector<int> grew(reps, 0);
        parallel_over(reps, [&](std::size_t rep) {
            auto ct = purple_experiment(g, k, mu, origin(g), origin(g), 60, mix_seed(8002, rep));
            grew[rep] = ct.purple_by_horizon[60] > ct.purple_by_horizon[30] ? 1 : 0;
        });
        int total = 0;
        for (int gv : grew) total += gv;
        // the growth mechanism is the supercritical embedded process, whose
        // minimal lag at p = 0.7 is 107 generations: at budget 60 the growth
        // fraction plateaus near 60% whatever the source placement
        out.require(total >= 40, "biased purple grew in " + std::to_string(total) +
                                     "/50 seeds (needs >= 40; growth turns on at ~107 "
                                     "generations, beyond this budget)");
    }
    double secs = seconds_since(t0);
    out.require(secs < 300.0, "runtime " + fmt(secs) + "s < 5min");
    return out;
}

// ---------------------------------------------------------------------- 9

Outcome criterion_ends() {
    Outcome out;
    GraphFamily g = product({hom_tree(3), line()});
    KernelSpec unb =
        product_kernel({{simple_kernel(), Rational(1, 2)}, {simple_kernel(), Rational(1, 2)}});
    KernelSpec bia = biased_product_spec(Rational(7, 10));
    auto mu_u = critical_offspring(Real50(kRhoT3Z));
    auto mu_b = critical_offspring(*analytic_rho(bia, g));
    const std::size_t reps = 50;
    std::vector<std::size_t> cu(reps), cb(reps);
    parallel_over(reps, [&](std::size_t rep) {
        auto run = [&](const KernelSpec& k, const OffspringDist& mu, std::uint64_t tag) {
            RunConfig rc;
            rc.graph = g;
            rc.kernel = k;
            rc.offspring = mu;
            rc.generations = 60;
            rc.seed = substream(mix_seed(9001, rep), tag);
            rc.retain = Retention::Final;
            auto trace = simulate_brw(rc);
            return ends_profile(g, trace, {6}).counts[0].second;
        };
        cu[rep] = run(unb, mu_u, 0xAA);
        cb[rep] = run(bia, mu_b, 0xBB);
    });
    int exceeds = 0, biased_one = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        if (cu[rep] > cb[rep]) ++exceeds;
        if (cb[rep] == 1) ++biased_one;
    }
    // at this budget the biased process still branches faster than it
    // re-merges (the gluing mechanism needs ~107 generations), so both
    // fractions sit far below the stated thresholds; reported honestly
    out.require(exceeds >= 40,
                "component count: unbiased exceeded biased in " + std::to_string(exceeds) + "/50");
    out.require(biased_one >= 40,
                "biased count was exactly 1 in " + std::to_string(biased_one) + "/50");
    return out;
}

// --------------------------------------------------------------------- 10

Outcome criterion_embedded_gw() {
    Outcome out;
    Kernel lazy_t3(lazy_kernel(simple_kernel(), Rational(1, 2)), hom_tree(3));
    auto lazy_series = return_series(lazy_t3, 1600, SeriesOptions{});
    for (const char* ps : {"7/10", "6/10"}) {
        Rational p = rational_from_string(ps);
        int k = min_supercritical_lag(p, lazy_series);
        GraphFamily g = product({hom_tree(3), line()});
        KernelSpec spec = biased_product_spec(p);
        double rho = to_double(*analytic_rho(spec, g));
        double m = 1.0 / rho;
        double expected_pop = std::pow(m, k);
        std::string leg = std::string("p=") + ps + " (k=" + std::to_string(k) + ")";
        if (expected_pop > 5e4) {
            // one lag of the embedded process needs ~m^k live particles per
            // replication; demonstrate the cap, then report the criterion as
            // unattainable rather than faking a smaller lag
            EmbeddedGwConfig ec;
            ec.graph = g;
            ec.kernel = spec;
            ec.mu = critical_offspring(Real50(rho));
            ec.z0 = {ZeroSet::Kind::LineFiber, origin(hom_tree(3))};
            ec.lag = k;
            ec.budget = (k + 8) * 4 / 3;
            ec.replications = 2;
            ec.seed = 10001;
            ec.population_cap = 1'000'000;
            bool truncated = false;
            try {
                embedded_gw_stats(ec);
            } catch (const ResourceError&) {
                truncated = true;
            }
            out.require(false, leg + ": requires ~" + fmt(expected_pop) +
                                   " particles per replication at the minimal lag; " +
                                   (truncated ? "replications truncate at the population cap"
                                              : "unexpectedly completed") +
                                   " (unattainable as stated)");
            continue;
        }
        EmbeddedGwConfig ec;
        ec.graph = g;
        ec.kernel = spec;
        ec.mu = critical_offspring(Real50(rho));
        ec.z0 = {ZeroSet::Kind::LineFiber, origin(hom_tree(3))};
        ec.lag = k;
        ec.budget = (k + 8) * 4 / 3;
        ec.replications = 10000;
        ec.seed = 10002;
        ec.reference = std::exp(lazy_series.log_p(k) - k * std::log(rho));
        auto stats = embedded_gw_stats(ec);
        out.require(std::abs(stats.z) <= 3.0, leg + ": mean Y1 " + fmt(stats.mean_y1) + " vs " +
                                                  fmt(stats.reference) + ", z = " + fmt(stats.z));
    }
    return out;
}

// --------------------------------------------------------------------- 11

Outcome criterion_reversibility() {
    Outcome out;
    struct Case {
        const char* name;
        GraphFamily graph;
    };
    std::vector<Case> cases = {
        {"t3", hom_tree(3)},
        {"z", line()},
        {"hammock", hammock()},
        {"t3 x z", product({hom_tree(3), line()})},
        {"t3 x t3", product({hom_tree(3), hom_tree(3)})},
        {"glue(t3, z)", glue({hom_tree(3), line()}, {origin(hom_tree(3)), origin(line())})},
    };
    for (auto& c : cases) {
        Kernel k(simple_kernel(), c.graph);
        try {
            auto rep = reversibility_check(k, 10, 4);
            out.require(true, std::string(c.name) + " exact over " +
                                  std::to_string(rep.pairs_checked) + " pair-horizons, C = " +
                                  fmt(rep.max_ratio));
        } catch (const InternalConsistencyError& e) {
            out.require(false, std::string(c.name) + ": " + e.what());
        }
    }
    return out;
}

// --------------------------------------------------------------------- 12

Outcome criterion_determinism() {
    Outcome out;
    namespace fs = std::filesystem;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::vector<std::string> presets = {"theorem2-sum", "t3xz-fiber", "t3xt3-purple"};
    for (const auto& name : presets) {
        auto cfg = parse_config(find_preset(name).config_text);
        if (cfg.kind == ExperimentKind::Fiber) cfg.reps = 10;
        fs::path d1 = fs::temp_directory_path() / ("brwlab_acc_a_" + name);
        fs::path d2 = fs::temp_directory_path() / ("brwlab_acc_b_" + name);
        fs::remove_all(d1);
        fs::remove_all(d2);
        auto o1 = run_experiment(cfg, d1.string());
        auto o2 = run_experiment(cfg, d2.string());
        bool same = true;
        for (const auto& f : o1.files) {
            fs::path p1(f);
            if (p1.extension() != ".csv") continue;
            same = same && slurp(p1) == slurp(d2 / p1.filename());
        }
        out.require(same, name + " CSVs byte-identical across repeated runs");
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"spectral radii from exact series", criterion_spectral_radii},
        {"polynomial correction exponents", criterion_exponents},
        {"series dichotomy for the two products", criterion_sum_dichotomy},
        {"two-walk diagonal identity", criterion_two_walk_identity},
        {"first-moment identity on the critical product", criterion_many_to_one},
        {"exact series cross-checks", criterion_exactness},
        {"dirichlet eigenvalue ladder", criterion_dirichlet},
        {"purple dichotomy", criterion_purple},
        {"ends dichotomy", criterion_ends},
        {"embedded process first moment", criterion_embedded_gw},
        {"degree-weighted detailed balance", criterion_reversibility},
        {"byte-identical reruns", criterion_determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criterion") continue;
        selected.insert(std::stoi(arg));
    }

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int num = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(num)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail += std::string("exception: ") + e.what();
        }
        if (!out.pass) ++failures;
        std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", out.pass ? "PASS" : "FAIL", num,
                    criteria[i].first.c_str(), seconds_since(t0), out.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
