#include "brwlab/series.hpp"

#include <algorithm>
#include <cmath>

#include "brwlab/chains.hpp"
#include "brwlab/logsum.hpp"

namespace brwlab {

double ReturnSeries::p(int n) const { return std::exp(logp[static_cast<std::size_t>(n)]); }

bool ReturnSeries::positive(int n) const {
    return !log_is_zero(logp[static_cast<std::size_t>(n)]);
}

const char* strategy_name(SeriesStrategy s) {
    switch (s) {
        case SeriesStrategy::Auto: return "auto";
        case SeriesStrategy::DistanceChain: return "distance-chain";
        case SeriesStrategy::HammockChain: return "hammock-chain";
        case SeriesStrategy::GluedChain: return "glued-chain";
        case SeriesStrategy::ProductConvolution: return "product-convolution";
        case SeriesStrategy::LazyMix: return "lazy-mix";
        case SeriesStrategy::SparseDP: return "sparse-dp";
    }
    return "?";
}

LazyPeel peel_lazy(const KernelSpec& spec) {
    if (const auto* l = std::get_if<LazySpec>(&spec.k)) {
        LazyPeel inner = peel_lazy(l->base.front());
        LazyPeel out;
        out.stay = l->stay + (1 - l->stay) * inner.stay;
        out.base = inner.base;
        return out;
    }
    return LazyPeel{Rational(0), spec};
}

namespace {

constexpr int kRationalHorizonCap = 512;

void check_rational_horizon(ArithmeticMode mode, int N) {
    if (mode == ArithmeticMode::Rational && N > kRationalHorizonCap)
        throw ResourceError("rational mode is limited to horizons <= " +
                            std::to_string(kRationalHorizonCap));
}

void fill_log_from_exact(ReturnSeries& s) {
    s.logp.resize(s.exact.size());
    for (std::size_t n = 0; n < s.exact.size(); ++n) {
        if (s.exact[n] == 0) {
            s.logp[n] = kLogZero;
        } else {
            double num = numerator(s.exact[n]).convert_to<double>();
            double den = denominator(s.exact[n]).convert_to<double>();
            if (std::isfinite(num) && std::isfinite(den)) {
                s.logp[n] = std::log(num) - std::log(den);
            } else {
                s.logp[n] = static_cast<double>(log(Real50(s.exact[n])));
            }
        }
    }
}

ReturnSeries from_chain(const Kernel& kernel, const LumpedChain& chain, int N,
                        const SeriesOptions& opts, SeriesStrategy strat) {
    ReturnSeries s;
    s.origin = origin(kernel.graph());
    s.period = kernel.period();
    s.mode = opts.mode;
    s.strategy = strategy_name(strat);
    if (opts.mode == ArithmeticMode::Rational) {
        s.exact = chain_return_exact(chain, N);
        fill_log_from_exact(s);
    } else {
        s.logp = chain_return_log(chain, N);
    }
    return s;
}

// Step-allocation convolution of two factor series: with total weight a+b and
// per-step factor choice a/(a+b), q_n = sum_k C(n,k) beta^k (1-beta)^(n-k) p1_k p2_(n-k).
ReturnSeries convolve_pair(const ReturnSeries& s1, const Rational& w1, const ReturnSeries& s2,
                           const Rational& w2, ArithmeticMode mode) {
    int N = std::min(s1.max_n(), s2.max_n());
    ReturnSeries out;
    out.mode = mode;
    out.period = (s1.period == 2 && s2.period == 2) ? 2 : 1;
    out.strategy = "product-convolution";
    Rational beta = w1 / (w1 + w2);
    if (mode == ArithmeticMode::Rational) {
        out.exact.resize(static_cast<std::size_t>(N) + 1);
        std::vector<Rational> bpow(static_cast<std::size_t>(N) + 1),
            cpow(static_cast<std::size_t>(N) + 1);
        bpow[0] = 1;
        cpow[0] = 1;
        for (int k = 1; k <= N; ++k) {
            bpow[k] = bpow[k - 1] * beta;
            cpow[k] = cpow[k - 1] * (1 - beta);
        }
        for (int n = 0; n <= N; ++n) {
            Rational acc = 0;
            for (int k = 0; k <= n; ++k) {
                const Rational& a = s1.exact[static_cast<std::size_t>(k)];
                const Rational& b = s2.exact[static_cast<std::size_t>(n - k)];
                if (a == 0 || b == 0) continue;
                acc += Rational(binomial_exact(n, k)) * bpow[k] * cpow[n - k] * a * b;
            }
            out.exact[static_cast<std::size_t>(n)] = acc;
        }
        fill_log_from_exact(out);
    } else {
        double lb = std::log(to_double(beta));
        double lc = std::log(to_double(1 - beta));
        out.logp.assign(static_cast<std::size_t>(N) + 1, kLogZero);
        for (int n = 0; n <= N; ++n) {
            double acc = kLogZero;
            for (int k = 0; k <= n; ++k) {
                double a = s1.logp[static_cast<std::size_t>(k)];
                double b = s2.logp[static_cast<std::size_t>(n - k)];
                if (log_is_zero(a) || log_is_zero(b)) continue;
                acc = log_add(acc, log_binomial(n, k) + k * lb + (n - k) * lc + a + b);
            }
            out.logp[static_cast<std::size_t>(n)] = acc;
        }
    }
    return out;
}

// Binomial mix with the identity: p^lazy_n = sum_j C(n,j) stay^(n-j) (1-stay)^j p_j.
ReturnSeries lazy_mix(const ReturnSeries& base, const Rational& stay, ArithmeticMode mode) {
    int N = base.max_n();
    ReturnSeries out;
    out.mode = mode;
    out.period = 1;
    out.strategy = "lazy-mix";
    if (mode == ArithmeticMode::Rational) {
        out.exact.resize(static_cast<std::size_t>(N) + 1);
        for (int n = 0; n <= N; ++n) {
            Rational acc = 0;
            // j moves, n-j stays
            std::vector<Rational> mpow(static_cast<std::size_t>(n) + 1);
            mpow[0] = 1;
            for (int j = 1; j <= n; ++j) mpow[j] = mpow[j - 1] * (1 - stay);
            Rational staypow = 1;
            for (int j = n; j >= 0; --j) {
                const Rational& b = base.exact[static_cast<std::size_t>(j)];
                if (b != 0) acc += Rational(binomial_exact(n, j)) * mpow[j] * staypow * b;
                staypow *= stay;
            }
            out.exact[static_cast<std::size_t>(n)] = acc;
        }
        fill_log_from_exact(out);
    } else {
        double ls = std::log(to_double(stay));
        double lm = std::log(to_double(1 - stay));
        out.logp.assign(static_cast<std::size_t>(N) + 1, kLogZero);
        for (int n = 0; n <= N; ++n) {
            double acc = kLogZero;
            for (int j = 0; j <= n; ++j) {
                double b = base.logp[static_cast<std::size_t>(j)];
                if (log_is_zero(b)) continue;
                acc = log_add(acc, log_binomial(n, j) + j * lm + (n - j) * ls + b);
            }
            out.logp[static_cast<std::size_t>(n)] = acc;
        }
    }
    return out;
}

ReturnSeries series_sparse(const Kernel& kernel, int N, const SeriesOptions& opts) {
    ReturnSeries s;
    s.origin = origin(kernel.graph());
    s.period = kernel.period();
    s.mode = opts.mode;
    s.strategy = strategy_name(SeriesStrategy::SparseDP);
    SparseDpLimits limits;
    limits.support_cap = opts.support_cap;
    limits.radius_cap = N / 2;  // a returning path of length <= N stays inside N/2
    const GraphFamily& g = kernel.graph();
    if (opts.mode == ArithmeticMode::Rational) {
        auto row_of = [&](const VertexAddr& v) { return kernel.step_distribution(v).probs; };
        DistVector<Rational> cur;
        cur[s.origin] = 1;
        s.exact.assign(static_cast<std::size_t>(N) + 1, Rational(0));
        s.exact[0] = 1;
        for (int n = 1; n <= N; ++n) {
            cur = sparse_dp_step(g, cur, row_of, limits);
            s.exact[static_cast<std::size_t>(n)] = mass_at(cur, s.origin);
        }
        fill_log_from_exact(s);
    } else {
        auto row_of = [&](const VertexAddr& v) { return kernel.step_distribution_double(v); };
        DistVector<double> cur;
        cur[s.origin] = 1.0;
        s.logp.assign(static_cast<std::size_t>(N) + 1, kLogZero);
        s.logp[0] = 0.0;
        for (int n = 1; n <= N; ++n) {
            cur = sparse_dp_step(g, cur, row_of, limits);
            double m = mass_at(cur, s.origin);
            s.logp[static_cast<std::size_t>(n)] = m > 0 ? std::log(m) : kLogZero;
        }
    }
    return s;
}

SeriesStrategy pick_strategy(const Kernel& kernel) {
    LazyPeel peel = peel_lazy(kernel.spec());
    const GraphFamily& g = kernel.graph();
    bool lazy = peel.stay > 0;
    if (std::holds_alternative<SimpleSpec>(peel.base.k)) {
        if (std::holds_alternative<HomTree>(g.g)) return SeriesStrategy::DistanceChain;
        if (std::holds_alternative<Line>(g.g)) return SeriesStrategy::DistanceChain;
        if (std::holds_alternative<Hammock>(g.g)) return SeriesStrategy::HammockChain;
        if (const auto* gl = std::get_if<Glued>(&g.g)) {
            for (const auto& part : gl->parts) {
                Kernel pk(peel.base, part);
                if (!quotient_chain(pk, 4)) return SeriesStrategy::SparseDP;
            }
            return SeriesStrategy::GluedChain;
        }
        if (as_product_form(peel.base, g)) {
            return lazy ? SeriesStrategy::LazyMix : SeriesStrategy::ProductConvolution;
        }
        return SeriesStrategy::SparseDP;
    }
    if (std::holds_alternative<BiasedLineSpec>(peel.base.k)) return SeriesStrategy::DistanceChain;
    if (std::holds_alternative<ProductKernelSpec>(peel.base.k)) {
        const auto& pk = std::get<ProductKernelSpec>(peel.base.k);
        const auto& prod = std::get<Product>(g.g);
        for (std::size_t i = 0; i < pk.factors.size(); ++i) {
            Kernel fk(pk.factors[i].first, prod.factors[i]);
            SeriesStrategy fs = pick_strategy(fk);
            if (fs == SeriesStrategy::SparseDP) return SeriesStrategy::SparseDP;
        }
        return lazy ? SeriesStrategy::LazyMix : SeriesStrategy::ProductConvolution;
    }
    return SeriesStrategy::SparseDP;
}

// product of factor chains under factor-pick weights: states are the grid of
// factor classes, levels and measures add
LumpedChain product_of_chains(const std::vector<std::pair<LumpedChain, Rational>>& factors) {
    LumpedChain out;
    std::vector<std::size_t> sizes, strides;
    std::size_t total = 1;
    for (const auto& [c, a] : factors) {
        sizes.push_back(c.size());
        strides.push_back(total);
        total *= c.size();
    }
    bool exact = true;
    for (const auto& [c, a] : factors) exact = exact && c.has_exact();
    out.rows_log.resize(total);
    if (exact) out.rows_exact.resize(total);
    out.level.assign(total, 0);
    out.log_size.assign(total, 0.0);
    out.log_pi.assign(total, 0.0);
    std::vector<std::size_t> idx(factors.size(), 0);
    for (std::size_t s = 0; s < total; ++s) {
        std::size_t rem = s;
        for (std::size_t f = 0; f < factors.size(); ++f) idx[f] = (rem / strides[f]) % sizes[f];
        (void)rem;
        double stay_log = kLogZero;
        Rational stay_exact = 0;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const auto& chain = factors[f].first;
            const Rational& alpha = factors[f].second;
            double la = std::log(to_double(alpha));
            out.level[s] += chain.level[idx[f]];
            out.log_size[s] += chain.log_size[idx[f]];
            out.log_pi[s] += chain.log_pi[idx[f]];
            for (std::size_t e = 0; e < chain.rows_log[idx[f]].size(); ++e) {
                auto [t, lp] = chain.rows_log[idx[f]][e];
                if (static_cast<std::size_t>(t) == idx[f]) {
                    stay_log = log_add(stay_log, la + lp);
                    if (exact) stay_exact += alpha * chain.rows_exact[idx[f]][e].second;
                    continue;
                }
                std::size_t target = s + (static_cast<std::size_t>(t) - idx[f]) * strides[f];
                out.rows_log[s].emplace_back(static_cast<std::int32_t>(target), la + lp);
                if (exact)
                    out.rows_exact[s].emplace_back(static_cast<std::int32_t>(target),
                                                   alpha * chain.rows_exact[idx[f]][e].second);
            }
        }
        if (!log_is_zero(stay_log)) {
            out.rows_log[s].emplace_back(static_cast<std::int32_t>(s), stay_log);
            if (exact) out.rows_exact[s].emplace_back(static_cast<std::int32_t>(s), stay_exact);
        }
    }
    std::size_t start = 0;
    for (std::size_t f = 0; f < factors.size(); ++f)
        start += static_cast<std::size_t>(factors[f].first.start) * strides[f];
    out.start = static_cast<std::int32_t>(start);
    return out;
}

} // namespace

std::optional<LumpedChain> quotient_chain(const Kernel& kernel, int max_level) {
    LazyPeel peel = peel_lazy(kernel.spec());
    const GraphFamily& g = kernel.graph();
    if (std::holds_alternative<SimpleSpec>(peel.base.k)) {
        if (const auto* t = std::get_if<HomTree>(&g.g))
            return tree_distance_chain(t->degree, peel.stay, max_level);
        if (std::holds_alternative<Line>(g.g))
            return line_position_chain(Rational(1, 2), peel.stay, max_level);
        if (std::holds_alternative<Hammock>(g.g))
            return hammock_level_chain(peel.stay, max_level);
        if (const auto* gl = std::get_if<Glued>(&g.g)) {
            std::vector<std::pair<LumpedChain, Rational>> parts;
            BigInt total_deg = 0;
            std::vector<BigInt> degs;
            for (std::size_t p = 0; p < gl->parts.size(); ++p) {
                degs.push_back(static_cast<BigInt>(degree_of(gl->parts[p], gl->basepoints[p])));
                total_deg += degs.back();
            }
            for (std::size_t p = 0; p < gl->parts.size(); ++p) {
                Kernel pk(peel.stay > 0 ? lazy_kernel(peel.base, peel.stay) : peel.base,
                          gl->parts[p]);
                auto pc = quotient_chain(pk, max_level);
                if (!pc) return std::nullopt;
                parts.emplace_back(std::move(*pc), Rational(degs[p], total_deg));
            }
            return glued_chain(parts);
        }
    }
    if (const auto* b = std::get_if<BiasedLineSpec>(&peel.base.k))
        return line_position_chain(b->p, peel.stay, max_level);
    std::optional<ProductKernelSpec> pf = as_product_form(peel.base, g);
    if (pf && peel.stay == 0) {
        const auto& prod = std::get<Product>(g.g);
        std::vector<std::pair<LumpedChain, Rational>> parts;
        for (std::size_t i = 0; i < pf->factors.size(); ++i) {
            Kernel fk(pf->factors[i].first, prod.factors[i]);
            auto fc = quotient_chain(fk, max_level);
            if (!fc) return std::nullopt;
            parts.emplace_back(std::move(*fc), pf->factors[i].second);
        }
        return product_of_chains(parts);
    }
    return std::nullopt;
}

ReturnSeries return_series(const Kernel& kernel, int N, SeriesOptions opts) {
    if (N < 1) throw ConfigError("series horizon must be >= 1");
    check_rational_horizon(opts.mode, N);
    SeriesStrategy strat = opts.strategy;
    if (strat == SeriesStrategy::Auto) strat = pick_strategy(kernel);

    const GraphFamily& g = kernel.graph();
    LazyPeel peel = peel_lazy(kernel.spec());

    switch (strat) {
        case SeriesStrategy::DistanceChain:
        case SeriesStrategy::HammockChain:
        case SeriesStrategy::GluedChain: {
            auto chain = quotient_chain(kernel, N / 2 + 1);
            if (!chain) throw ConfigError("no quotient chain exists for this kernel");
            return from_chain(kernel, *chain, N, opts, strat);
        }
        case SeriesStrategy::ProductConvolution:
        case SeriesStrategy::LazyMix: {
            auto pf = as_product_form(peel.base, g);
            if (!pf) throw ConfigError("no product form available for convolution strategy");
            const auto& prod = std::get<Product>(g.g);
            SeriesOptions fopts = opts;
            fopts.strategy = SeriesStrategy::Auto;
            ReturnSeries acc;
            Rational acc_weight = 0;
            for (std::size_t i = 0; i < pf->factors.size(); ++i) {
                Kernel fk(pf->factors[i].first, prod.factors[i]);
                ReturnSeries fs = return_series(fk, N, fopts);
                if (i == 0) {
                    acc = std::move(fs);
                    acc_weight = pf->factors[i].second;
                } else {
                    acc = convolve_pair(acc, acc_weight, fs, pf->factors[i].second, opts.mode);
                    acc_weight += pf->factors[i].second;
                }
            }
            if (peel.stay > 0) acc = lazy_mix(acc, peel.stay, opts.mode);
            acc.origin = origin(g);
            acc.period = kernel.period();
            return acc;
        }
        case SeriesStrategy::SparseDP:
            return series_sparse(kernel, N, opts);
        case SeriesStrategy::Auto:
            break;
    }
    throw InternalConsistencyError("unreachable series strategy");
}

DistVector<double> sparse_distribution(const Kernel& kernel, const VertexAddr& start, int steps,
                                       const SparseDpLimits& limits) {
    validate_address(kernel.graph(), start);
    auto row_of = [&](const VertexAddr& v) { return kernel.step_distribution_double(v); };
    DistVector<double> cur;
    cur[start] = 1.0;
    for (int n = 0; n < steps; ++n) cur = sparse_dp_step(kernel.graph(), cur, row_of, limits);
    return cur;
}

DistVector<Rational> sparse_distribution_exact(const Kernel& kernel, const VertexAddr& start,
                                               int steps, const SparseDpLimits& limits) {
    validate_address(kernel.graph(), start);
    auto row_of = [&](const VertexAddr& v) { return kernel.step_distribution(v).probs; };
    DistVector<Rational> cur;
    cur[start] = 1;
    for (int n = 0; n < steps; ++n) cur = sparse_dp_step(kernel.graph(), cur, row_of, limits);
    return cur;
}

} // namespace brwlab
