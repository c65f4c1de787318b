#include <doctest.h>

#include <map>

#include "brwlab/series.hpp"

using namespace brwlab;

namespace {

// Brute-force return probability of the isotropic walk by path enumeration
// over neighbors(); independent of the kernel and chain machinery.
Rational enumerate_return(const GraphFamily& g, int n) {
    std::map<VertexAddr, Rational> cur{{origin(g), Rational(1)}};
    for (int s = 0; s < n; ++s) {
        std::map<VertexAddr, Rational> next;
        for (const auto& [v, p] : cur) {
            auto nb = neighbors(g, v);
            Rational step = p / static_cast<BigInt>(nb.size());
            for (const auto& u : nb) next[u] += step;
        }
        cur = std::move(next);
    }
    auto it = cur.find(origin(g));
    return it == cur.end() ? Rational(0) : it->second;
}

Kernel fair_product(std::vector<GraphFamily> factors) {
    std::vector<std::pair<KernelSpec, Rational>> parts;
    Rational w(1, static_cast<BigInt>(factors.size()));
    for (std::size_t i = 0; i < factors.size(); ++i) parts.emplace_back(simple_kernel(), w);
    GraphFamily g = product(std::move(factors));
    return Kernel(product_kernel(std::move(parts)), g);
}

} // namespace

TEST_CASE("tree return probabilities: 1/3 at two steps, 5/27 at four") {
    Kernel k(simple_kernel(), hom_tree(3));
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 8, opts);
    CHECK(s.exact[0] == 1);
    CHECK(s.exact[2] == Rational(1, 3));
    CHECK(s.exact[4] == Rational(5, 27));
    // enumeration oracle for the rest
    for (int n = 1; n <= 8; ++n) CHECK(s.exact[n] == enumerate_return(hom_tree(3), n));
}

TEST_CASE("lazy tree walk returns 1/2 then 1/3") {
    Kernel k(lazy_kernel(simple_kernel(), Rational(1, 2)), hom_tree(3));
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 6, opts);
    CHECK(s.period == 1);
    CHECK(s.exact[1] == Rational(1, 2));
    CHECK(s.exact[2] == Rational(1, 3));
}

TEST_CASE("hammock returns: 31/210 at two steps, 4/105 at three") {
    Kernel k(simple_kernel(), hammock());
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 6, opts);
    CHECK(s.exact[2] == Rational(31, 210));
    CHECK(s.exact[3] == Rational(4, 105));  // odd returns exist: the hammock is not bipartite
    CHECK(s.period == 1);
    for (int n = 1; n <= 6; ++n) CHECK(s.exact[n] == enumerate_return(hammock(), n));
}

TEST_CASE("line returns are central binomials") {
    Kernel k(simple_kernel(), line());
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 30, opts);
    BigInt four = 4;
    for (int m = 1; m <= 15; ++m) {
        BigInt den = 1;
        for (int i = 0; i < m; ++i) den *= four;
        CHECK(s.exact[2 * m] == Rational(binomial_exact(2 * m, m), den));
        CHECK(s.exact[2 * m - 1] == 0);
    }
    // and in the log domain at long horizons, against exact big-integer values
    auto sf = return_series(k, 4000, SeriesOptions{});
    for (int m : {500, 1000, 2000}) {
        Rational exact(binomial_exact(2 * m, m));
        for (int i = 0; i < m; ++i) exact /= 4;
        double lref = static_cast<double>(log(Real50(exact)));
        CHECK(sf.log_p(2 * m) == doctest::Approx(lref).epsilon(1e-12));
    }
}

TEST_CASE("biased line returns") {
    Kernel k(biased_line_kernel(Rational(7, 10)), line());
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 12, opts);
    // p_{2m} = C(2m, m) p^m q^m
    Rational pq = Rational(7, 10) * Rational(3, 10);
    Rational pw = 1;
    for (int m = 1; m <= 6; ++m) {
        pw *= pq;
        CHECK(s.exact[2 * m] == Rational(binomial_exact(2 * m, m)) * pw);
    }
}

TEST_CASE("product series via convolution match the sparse DP exactly") {
    // the quotient and convolution routes must agree with the raw
    // vertex-space DP to 1e-12 on every family (here: exactly, in rationals)
    struct Case {
        const char* name;
        Kernel kernel;
    };
    std::vector<Case> cases;
    cases.push_back({"t3", Kernel(simple_kernel(), hom_tree(3))});
    cases.push_back({"z", Kernel(simple_kernel(), line())});
    cases.push_back({"t3 x z", fair_product({hom_tree(3), line()})});
    cases.push_back({"t3 x t3", fair_product({hom_tree(3), hom_tree(3)})});
    cases.push_back({"lazy t3", Kernel(lazy_kernel(simple_kernel(), Rational(1, 2)), hom_tree(3))});
    cases.push_back(
        {"t3 x biased z",
         Kernel(product_kernel({{simple_kernel(), Rational(1, 2)},
                                {biased_line_kernel(Rational(7, 10)), Rational(1, 2)}}),
                product({hom_tree(3), line()}))});
    cases.push_back(
        {"isotropic t3 x z (3/5, 2/5)",
         Kernel(product_kernel({{simple_kernel(), Rational(3, 5)}, {simple_kernel(), Rational(2, 5)}}),
                product({hom_tree(3), line()}))});

    for (auto& c : cases) {
        SeriesOptions fast;
        fast.mode = ArithmeticMode::Rational;
        SeriesOptions raw = fast;
        raw.strategy = SeriesStrategy::SparseDP;
        auto a = return_series(c.kernel, 20, fast);
        auto b = return_series(c.kernel, 20, raw);
        INFO(c.name << " via " << a.strategy);
        CHECK(a.strategy != b.strategy);  // the fast route really is a different route
        for (int n = 0; n <= 20; ++n) CHECK(a.exact[n] == b.exact[n]);
    }

    // the hammock ball at radius 10 is large; keep the exact cross-check at a
    // shorter horizon here (the acceptance suite covers n = 20 in doubles)
    {
        Kernel hk(simple_kernel(), hammock());
        SeriesOptions fast;
        fast.mode = ArithmeticMode::Rational;
        SeriesOptions raw = fast;
        raw.strategy = SeriesStrategy::SparseDP;
        auto a = return_series(hk, 14, fast);
        auto b = return_series(hk, 14, raw);
        CHECK(a.strategy == "hammock-chain");
        for (int n = 0; n <= 14; ++n) CHECK(a.exact[n] == b.exact[n]);
    }
}

TEST_CASE("float-mode series agree with rational mode") {
    Kernel k = fair_product({hom_tree(3), hom_tree(3)});
    SeriesOptions r;
    r.mode = ArithmeticMode::Rational;
    auto exact = return_series(k, 24, r);
    auto fl = return_series(k, 24, SeriesOptions{});
    for (int n = 0; n <= 24; ++n) {
        if (exact.exact[n] == 0) {
            CHECK(!fl.positive(n));
        } else {
            CHECK(fl.p(n) == doctest::Approx(to_double(exact.exact[n])).epsilon(1e-12));
        }
    }
}

TEST_CASE("fair product at two steps: half the single-tree return") {
    Kernel k = fair_product({hom_tree(3), hom_tree(3)});
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 4, opts);
    CHECK(s.exact[2] == Rational(1, 6));  // (1/2) * 1/3
}

TEST_CASE("bipartite parity: odd returns vanish") {
    for (auto* k : {new Kernel(simple_kernel(), hom_tree(3)), new Kernel(simple_kernel(), line())}) {
        auto s = return_series(*k, 21, SeriesOptions{});
        for (int n = 1; n <= 21; n += 2) CHECK(!s.positive(n));
        delete k;
    }
    auto s2 = return_series(fair_product({hom_tree(3), hom_tree(3)}), 21, SeriesOptions{});
    for (int n = 1; n <= 21; n += 2) CHECK(!s2.positive(n));
}

TEST_CASE("hammock bounce lower bound: p_{2n} >= (4/5)^n (1/7)^n") {
    Kernel k(simple_kernel(), hammock());
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 30, opts);
    Rational bound = 1;
    for (int n = 1; n <= 15; ++n) {
        bound *= Rational(4, 35);
        CHECK(s.exact[2 * n] >= bound);
    }
}

TEST_CASE("glued graphs fall back to the sparse route and stay exact") {
    GraphFamily g = glue({line(), line()}, {origin(line()), origin(line())});
    Kernel k(simple_kernel(), g);
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    auto s = return_series(k, 10, opts);
    for (int n = 1; n <= 10; ++n) CHECK(s.exact[n] == enumerate_return(g, n));
}

TEST_CASE("sparse DP reports a resource error at the support cap") {
    Kernel k = fair_product({hom_tree(3), hom_tree(3)});
    SeriesOptions opts;
    opts.strategy = SeriesStrategy::SparseDP;
    opts.support_cap = 50;
    CHECK_THROWS_AS(return_series(k, 30, opts), ResourceError);
}

TEST_CASE("rational mode rejects very long horizons") {
    Kernel k(simple_kernel(), hom_tree(3));
    SeriesOptions opts;
    opts.mode = ArithmeticMode::Rational;
    CHECK_THROWS_AS(return_series(k, 4000, opts), ResourceError);
}
