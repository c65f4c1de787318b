#include "brwlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "brwlab/logsum.hpp"

namespace brwlab {

namespace {

struct LinFit {
    double intercept = 0;
    double slope = 0;
    double r2 = 0;
    std::size_t n = 0;
};

LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit f;
    f.n = x.size();
    if (f.n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(f.n);
    my /= double(f.n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

std::vector<int> positive_window(const ReturnSeries& s, int lo, int hi) {
    std::vector<int> idx;
    for (int n = std::max(lo, 1); n <= hi; ++n)
        if (s.positive(n)) idx.push_back(n);
    return idx;
}

} // namespace

SpectralFit fit_spectral(const ReturnSeries& series, std::optional<double> known_rho) {
    int N = series.max_n();
    std::size_t positives = 0;
    for (int n = 0; n <= N; ++n)
        if (series.positive(n)) ++positives;
    if (positives < 200)
        throw InsufficientDataError("spectral fit needs at least 200 positive terms");

    SpectralFit fit;
    fit.window_lo = N / 2;
    fit.window_hi = N;
    auto window = positive_window(series, fit.window_lo, fit.window_hi);

    double log_rho;
    if (known_rho) {
        log_rho = std::log(*known_rho);
        fit.rho_was_known = true;
        fit.method = "known-rho regression";
    } else {
        // log(p_{n+per}/p_n)/per = log rho - a/n + O(1/n^2): regress on 1/n
        int per = series.period;
        std::vector<double> xs, ys;
        for (int n : window) {
            if (n + per > N || !series.positive(n + per)) continue;
            xs.push_back(1.0 / double(n));
            ys.push_back((series.log_p(n + per) - series.log_p(n)) / double(per));
        }
        if (xs.size() < 8) throw InsufficientDataError("too few ratio points for rho estimation");
        LinFit rf = least_squares(xs, ys);
        log_rho = rf.intercept;
        fit.method = "ratio extrapolation + regression";
    }
    fit.rho_hat = std::exp(log_rho);

    std::vector<double> xs, ys;
    for (int n : window) {
        xs.push_back(std::log(double(n)));
        ys.push_back(series.log_p(n) - double(n) * log_rho);
    }
    LinFit ef = least_squares(xs, ys);
    fit.a_hat = -ef.slope;
    fit.log_c_hat = ef.intercept;
    fit.r2 = ef.r2;
    return fit;
}

std::optional<Real50> analytic_rho(const KernelSpec& spec, const GraphFamily& g) {
    if (const auto* l = std::get_if<LazySpec>(&spec.k)) {
        auto base = analytic_rho(l->base.front(), g);
        if (!base) return std::nullopt;
        Real50 s(l->stay);
        return s + (1 - s) * (*base);
    }
    if (const auto* b = std::get_if<BiasedLineSpec>(&spec.k)) {
        Real50 p(b->p);
        return 2 * sqrt(p * (1 - p));
    }
    if (std::holds_alternative<HeightBiasedSpec>(spec.k)) return std::nullopt;
    if (const auto* pk = std::get_if<ProductKernelSpec>(&spec.k)) {
        const auto* prod = std::get_if<Product>(&g.g);
        if (!prod) return std::nullopt;
        Real50 acc = 0;
        for (std::size_t i = 0; i < pk->factors.size(); ++i) {
            auto r = analytic_rho(pk->factors[i].first, prod->factors[i]);
            if (!r) return std::nullopt;
            acc += Real50(pk->factors[i].second) * (*r);
        }
        return acc;
    }
    // simple walk
    if (const auto* t = std::get_if<HomTree>(&g.g)) {
        Real50 d(t->degree);
        return 2 * sqrt(d - 1) / d;
    }
    if (std::holds_alternative<Line>(g.g)) return Real50(1);
    if (auto pf = as_product_form(spec, g)) return analytic_rho(KernelSpec(*pf), g);
    return std::nullopt;  // hammock, glued: no closed form claimed
}

// --------------------------------------------------------------------------
// Dirichlet spectral radius.

DirichletResult dirichlet_rho(const Kernel& kernel, std::int64_t radius, int max_iters,
                              double tol) {
    DirichletResult out;
    if (auto chain = quotient_chain(kernel, static_cast<int>(radius) + 1)) {
        auto res = dirichlet_power_iteration(*chain, radius, max_iters, tol);
        out.value = res.value;
        out.delta = res.delta;
        out.converged = res.converged;
        out.iterations = res.iterations;
        out.states = res.states;
        out.operator_kind = "quotient-chain";
        return out;
    }
    // vertex ball with absorbing boundary
    auto verts = ball(kernel.graph(), radius);
    std::unordered_map<VertexAddr, std::int32_t, AddrHash> index;
    index.reserve(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i)
        index.emplace(verts[i], static_cast<std::int32_t>(i));
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(verts.size());
    std::vector<double> log_pi(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) {
        log_pi[i] = kernel.log_reversing_measure(verts[i]);
        for (const auto& [u, p] : kernel.step_distribution_double(verts[i])) {
            auto it = index.find(u);
            if (it == index.end()) continue;
            rows[i].emplace_back(it->second, p);
        }
    }
    auto res = dirichlet_power_iteration_csr(rows, log_pi, max_iters, tol);
    out.value = res.value;
    out.delta = res.delta;
    out.converged = res.converged;
    out.iterations = res.iterations;
    out.states = res.states;
    out.operator_kind = "vertex-ball";
    return out;
}

// --------------------------------------------------------------------------
// Condition reports.

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Diverging: return "diverging";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// The exponent band matches the acceptance bands for a-hat: a series with
// fitted a in (2 - margin, 2 + margin] cannot be classified reliably at
// these horizons, so the decision edge sits at 2 + margin.
constexpr double kExponentMargin = 0.1;
constexpr double kTailTolerance = 1e-6;
constexpr double kDivergenceR2 = 0.99;

void classify_terms(const std::vector<double>& terms, const std::vector<double>& partial,
                    double a_hat, double r2, Verdict& verdict, double& tail) {
    // tail estimate: density of the last positive summand (the term with its
    // linear weight stripped) relative to the accumulated sum.  A resolution
    // guard: it stays large while the horizon is too short for the fitted
    // exponent to be trusted, and collapses once the series is resolved.
    tail = 0;
    for (std::size_t n = terms.size(); n-- > 0;) {
        if (terms[n] > 0) {
            tail = terms[n] / double(n + 1) / partial.back();
            break;
        }
    }
    if (a_hat > 2.0 + kExponentMargin && tail < kTailTolerance) {
        verdict = Verdict::Converged;
    } else if (a_hat <= 2.0 + kExponentMargin && r2 >= kDivergenceR2) {
        verdict = Verdict::Diverging;
    } else {
        verdict = Verdict::Inconclusive;
    }
}

} // namespace

ConditionReport criticality_sum(const ReturnSeries& series, double rho, int N) {
    if (rho <= 0) throw DomainError("criticality sum needs rho > 0");
    N = std::min(N, series.max_n());
    ConditionReport rep;
    rep.terms.resize(static_cast<std::size_t>(N) + 1);
    rep.partial_sums.resize(static_cast<std::size_t>(N) + 1);
    double log_rho = std::log(rho);
    double acc = 0;
    for (int n = 0; n <= N; ++n) {
        double t = series.positive(n)
                       ? std::exp(std::log(double(n + 1)) - n * log_rho + series.log_p(n))
                       : 0.0;
        rep.terms[static_cast<std::size_t>(n)] = t;
        acc += t;
        rep.partial_sums[static_cast<std::size_t>(n)] = acc;
    }
    auto fit = fit_spectral(series, rho);
    rep.a_hat = fit.a_hat;
    rep.r2 = fit.r2;
    classify_terms(rep.terms, rep.partial_sums, rep.a_hat, rep.r2, rep.verdict, rep.tail_estimate);
    return rep;
}

// --------------------------------------------------------------------------
// Two independent walks.

namespace {

struct FactorVectors {
    // per-step class vectors from each start, plus class weights 1/|class|
    std::vector<std::vector<double>> from_a;
    std::vector<std::vector<double>> from_b;
    std::vector<double> inv_size;
};

// inner-product table A(s,t) = <u_s, D v_t> for one factor
std::vector<std::vector<double>> inner_table(const FactorVectors& fv, int N) {
    std::vector<std::vector<double>> A(static_cast<std::size_t>(N) + 1,
                                       std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0));
    std::size_t S = fv.inv_size.size();
    for (int a = 0; a <= N; ++a) {
        for (int b = 0; b <= N; ++b) {
            double acc = 0;
            const auto& u = fv.from_a[static_cast<std::size_t>(a)];
            const auto& v = fv.from_b[static_cast<std::size_t>(b)];
            for (std::size_t s = 0; s < S; ++s) acc += u[s] * v[s] * fv.inv_size[s];
            A[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = acc;
        }
    }
    return A;
}

std::int64_t tree_distance(const TreeWord& a, const TreeWord& b) {
    std::size_t n = std::min(a.letters.size(), b.letters.size());
    std::size_t l = 0;
    while (l < n && a.letters[l] == b.letters[l]) ++l;
    return static_cast<std::int64_t>(a.letters.size() + b.letters.size() - 2 * l);
}

// Builds the per-factor class vectors for trees and lines; empty optional if
// the factor is not chain-representable.
std::optional<FactorVectors> factor_vectors(const KernelSpec& fspec, const GraphFamily& fg,
                                            const VertexAddr& ia, const VertexAddr& ib, int N) {
    LazyPeel peel = peel_lazy(fspec);
    FactorVectors fv;
    if (const auto* t = std::get_if<HomTree>(&fg.g)) {
        if (!std::holds_alternative<SimpleSpec>(peel.base.k)) return std::nullopt;
        const auto& wa = std::get<TreeWord>(ia.v);
        const auto& wb = std::get<TreeWord>(ib.v);
        // classes relative to the canonicalised pair; distances are all that matter
        auto [ca, cb] = canonical_pair(fg, ia, ib);
        (void)ca;
        (void)cb;
        int D = static_cast<int>(tree_distance(wa, wb));
        auto tc = two_center_tree_chain(t->degree, D, N);
        fv.from_a = chain_step_vectors(tc.chain, tc.start_a, N);
        fv.from_b = chain_step_vectors(tc.chain, tc.start_b, N);
        fv.inv_size.resize(tc.chain.size());
        for (std::size_t s = 0; s < tc.chain.size(); ++s)
            fv.inv_size[s] = std::exp(-tc.chain.log_size[s]);
        return fv;
    }
    if (std::holds_alternative<Line>(fg.g)) {
        Rational p_right(1, 2);
        if (const auto* b = std::get_if<BiasedLineSpec>(&peel.base.k)) {
            p_right = b->p;
        } else if (!std::holds_alternative<SimpleSpec>(peel.base.k)) {
            return std::nullopt;
        }
        auto za = std::get<LineInt>(ia.v).z;
        auto zb = std::get<LineInt>(ib.v).z;
        // positions relative to the midpoint-ish shift keep indices in range
        std::int64_t span = std::max(std::abs(za), std::abs(zb));
        int M = N + static_cast<int>(span) + 1;
        auto chain = line_position_chain(p_right, peel.stay, M);
        auto idx = [&](std::int64_t z) { return static_cast<std::int32_t>(z + M); };
        fv.from_a = chain_step_vectors(chain, idx(za), N);
        fv.from_b = chain_step_vectors(chain, idx(zb), N);
        fv.inv_size.assign(chain.size(), 1.0);
        return fv;
    }
    return std::nullopt;
}

} // namespace

TwoWalkReport two_walk_sum(const Kernel& kernel, const VertexAddr& i, const VertexAddr& j,
                           double m, int N, const TwoWalkOptions& opts) {
    validate_address(kernel.graph(), i);
    validate_address(kernel.graph(), j);
    TwoWalkReport rep;
    const GraphFamily& g = kernel.graph();

    std::vector<std::vector<double>> G;  // G[k][n] = <f_k, D g_n>, k+n<=N

    LazyPeel peel = peel_lazy(kernel.spec());
    auto pf = (peel.stay == 0) ? as_product_form(peel.base, g) : std::nullopt;
    bool class_route = false;
    if (pf && pf->factors.size() == 2) {
        const auto& prod = std::get<Product>(g.g);
        const auto& pi = std::get<ProductAddr>(i.v);
        const auto& pj = std::get<ProductAddr>(j.v);
        auto f1 = factor_vectors(pf->factors[0].first, prod.factors[0], pi.factors[0],
                                 pj.factors[0], N);
        auto f2 = factor_vectors(pf->factors[1].first, prod.factors[1], pi.factors[1],
                                 pj.factors[1], N);
        if (f1 && f2) {
            class_route = true;
            rep.route = "two-centre classes";
            auto A1 = inner_table(*f1, N);
            auto A2 = inner_table(*f2, N);
            // binomial step-allocation weights B[k][k1] = C(k,k1) a1^k1 a2^(k-k1)
            double a1 = to_double(pf->factors[0].second);
            double a2 = to_double(pf->factors[1].second);
            std::vector<std::vector<double>> B(static_cast<std::size_t>(N) + 1);
            B[0] = {1.0};
            for (int k = 1; k <= N; ++k) {
                auto& row = B[static_cast<std::size_t>(k)];
                const auto& prev = B[static_cast<std::size_t>(k - 1)];
                row.assign(static_cast<std::size_t>(k) + 1, 0.0);
                for (int k1 = 0; k1 < k; ++k1) {
                    row[static_cast<std::size_t>(k1)] += prev[static_cast<std::size_t>(k1)] * a2;
                    row[static_cast<std::size_t>(k1) + 1] +=
                        prev[static_cast<std::size_t>(k1)] * a1;
                }
            }
            G.resize(static_cast<std::size_t>(N) + 1);
            for (int k = 0; k <= N; ++k) {
                G[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(N - k) + 1, 0.0);
                for (int n = 0; n + k <= N; ++n) {
                    double acc = 0;
                    for (int k1 = 0; k1 <= k; ++k1) {
                        double wk = B[static_cast<std::size_t>(k)][static_cast<std::size_t>(k1)];
                        if (wk == 0) continue;
                        double inner = 0;
                        for (int n1 = 0; n1 <= n; ++n1) {
                            double wn =
                                B[static_cast<std::size_t>(n)][static_cast<std::size_t>(n1)];
                            if (wn == 0) continue;
                            inner += wn * A1[static_cast<std::size_t>(k1)]
                                            [static_cast<std::size_t>(n1)] *
                                     A2[static_cast<std::size_t>(k - k1)]
                                       [static_cast<std::size_t>(n - n1)];
                        }
                        acc += wk * inner;
                    }
                    G[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = acc;
                }
            }
        }
    }

    if (!class_route) {
        // raw sparse vectors under the support cap
        rep.route = "sparse vectors";
        SparseDpLimits limits;
        limits.support_cap = opts.support_cap;
        auto row_of = [&](const VertexAddr& v) { return kernel.step_distribution_double(v); };
        std::vector<DistVector<double>> fs;
        fs.reserve(static_cast<std::size_t>(N) + 1);
        DistVector<double> cur;
        cur[i] = 1.0;
        fs.push_back(cur);
        for (int k = 1; k <= N; ++k) {
            cur = sparse_dp_step(g, cur, row_of, limits);
            fs.push_back(cur);
        }
        G.resize(static_cast<std::size_t>(N) + 1);
        for (int k = 0; k <= N; ++k)
            G[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(N - k) + 1, 0.0);
        DistVector<double> gv;
        gv[j] = 1.0;
        for (int n = 0; n <= N; ++n) {
            if (n > 0) gv = sparse_dp_step(g, gv, row_of, limits);
            for (int k = 0; k + n <= N; ++k) {
                const auto& fk = fs[static_cast<std::size_t>(k)];
                const auto& small = fk.size() < gv.size() ? fk : gv;
                const auto& big = fk.size() < gv.size() ? gv : fk;
                double acc = 0;
                for (const auto& [v, mass] : small) {
                    auto it = big.find(v);
                    if (it != big.end()) acc += mass * it->second;
                }
                G[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = acc;
            }
        }
    }

    double log_m = std::log(m);
    rep.terms.assign(static_cast<std::size_t>(N) + 1, 0.0);
    rep.partial_sums.assign(static_cast<std::size_t>(N) + 1, 0.0);
    double acc = 0;
    for (int s = 0; s <= N; ++s) {
        double sum = 0;
        for (int k = 0; k <= s; ++k)
            sum += G[static_cast<std::size_t>(k)][static_cast<std::size_t>(s - k)];
        double t = sum * std::exp(s * log_m);
        rep.terms[static_cast<std::size_t>(s)] = t;
        acc += t;
        rep.partial_sums[static_cast<std::size_t>(s)] = acc;
    }

    if (opts.diagonal && i == j) {
        double worst = 0;
        for (int s = 0; s <= std::min(N, opts.diagonal->max_n()); ++s) {
            double ref = opts.diagonal->positive(s)
                             ? (s + 1) * std::exp(s * log_m + opts.diagonal->log_p(s))
                             : 0.0;
            double got = rep.terms[static_cast<std::size_t>(s)];
            if (ref == 0) {
                if (got > 1e-14) worst = std::max(worst, 1.0);
                continue;
            }
            worst = std::max(worst, std::abs(got - ref) / ref);
        }
        rep.max_rel_diag_gap = worst;
    }

    // decay diagnostics on the positive terms in the upper window
    {
        std::vector<double> xs, ys;
        for (int s = N / 2; s <= N; ++s) {
            double t = rep.terms[static_cast<std::size_t>(s)];
            if (t > 0) {
                xs.push_back(std::log(double(s)));
                ys.push_back(std::log(t));
            }
        }
        if (xs.size() >= 8) {
            LinFit f = least_squares(xs, ys);
            rep.a_hat = 1.0 - f.slope;  // terms ~ s^(1-a)
            rep.r2 = f.r2;
            classify_terms(rep.terms, rep.partial_sums, rep.a_hat, rep.r2, rep.verdict,
                           rep.tail_estimate);
        }
    }
    return rep;
}

RegimeReport classify_regime(double m, double rho) {
    if (m < 1 || rho <= 0 || rho > 1) throw DomainError("classify_regime needs m >= 1, rho in (0,1]");
    RegimeReport r;
    double inv = 1.0 / rho;
    if (std::abs(m - inv) <= 1e-9) {
        r.regime = Regime::Critical;
        r.critical = true;
        r.transient = true;  // critical branching walks are transient
    } else if (m < inv) {
        r.regime = Regime::Transient;
        r.transient = true;
    } else {
        r.regime = Regime::Recurrent;
    }
    return r;
}

NumericalRho numerical_rho(const Kernel& kernel) {
    if (auto r = analytic_rho(kernel.spec(), kernel.graph()))
        return {to_double(*r), "closed-form"};
    if (quotient_chain(kernel, 8)) {
        SeriesOptions opts;
        auto series = return_series(kernel, 4000, opts);
        auto fit = fit_spectral(series, std::nullopt);
        return {fit.rho_hat, "series-fit"};
    }
    // Dirichlet ladder extrapolated under rho_R ~ rho - c/R^2
    std::vector<double> xs, ys;
    for (std::int64_t R : {6, 8, 10, 12}) {
        auto d = dirichlet_rho(kernel, R);
        xs.push_back(1.0 / double(R * R));
        ys.push_back(d.value);
    }
    LinFit f = least_squares(xs, ys);
    return {f.intercept, "dirichlet-extrapolation"};
}

} // namespace brwlab
