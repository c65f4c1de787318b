#include "brwlab/chains.hpp"

#include <algorithm>
#include <cmath>

#include "brwlab/errors.hpp"
#include "brwlab/logsum.hpp"

namespace brwlab {

namespace {

double rational_log(const Rational& q) {
    if (q == 0) return kLogZero;
    // exact enough for chain probabilities; avoids underflow via the split
    double num = numerator(q).convert_to<double>();
    double den = denominator(q).convert_to<double>();
    if (std::isfinite(num) && std::isfinite(den) && num > 0 && den > 0)
        return std::log(num) - std::log(den);
    return static_cast<double>(log(Real50(q)));
}

void derive_log_rows(LumpedChain& c) {
    c.rows_log.resize(c.rows_exact.size());
    for (std::size_t s = 0; s < c.rows_exact.size(); ++s) {
        c.rows_log[s].clear();
        for (const auto& [t, p] : c.rows_exact[s]) c.rows_log[s].emplace_back(t, rational_log(p));
    }
}

} // namespace

LumpedChain tree_distance_chain(int degree, const Rational& stay, int max_dist) {
    if (degree < 3) throw ConfigError("tree distance chain requires degree >= 3");
    LumpedChain c;
    int S = max_dist + 1;
    c.rows_exact.resize(S);
    c.level.resize(S);
    c.log_size.resize(S);
    c.log_pi.resize(S);
    Rational move = 1 - stay;
    for (int r = 0; r < S; ++r) {
        auto& row = c.rows_exact[r];
        if (stay > 0) row.emplace_back(r, stay);
        if (r == 0) {
            if (1 < S) row.emplace_back(1, move);
        } else {
            row.emplace_back(r - 1, move / degree);
            if (r + 1 < S) row.emplace_back(r + 1, move * (degree - 1) / degree);
        }
        c.level[r] = r;
        // class size d (d-1)^{r-1} for r >= 1
        c.log_size[r] =
            r == 0 ? 0.0 : std::log(double(degree)) + (r - 1) * std::log(double(degree - 1));
        c.log_pi[r] = c.log_size[r];  // degree-regular: pi proportional to class size
    }
    c.start = 0;
    derive_log_rows(c);
    return c;
}

LumpedChain line_position_chain(const Rational& p_right, const Rational& stay, int max_dist) {
    LumpedChain c;
    int S = 2 * max_dist + 1;
    c.rows_exact.resize(S);
    c.level.resize(S);
    c.log_size.resize(S);
    c.log_pi.resize(S);
    Rational move = 1 - stay;
    Rational pr = move * p_right;
    Rational pl = move * (1 - p_right);
    double log_ratio = rational_log(p_right) - rational_log(1 - p_right);
    for (int i = 0; i < S; ++i) {
        int z = i - max_dist;
        auto& row = c.rows_exact[i];
        if (stay > 0) row.emplace_back(i, stay);
        if (i > 0) row.emplace_back(i - 1, pl);
        if (i + 1 < S) row.emplace_back(i + 1, pr);
        c.level[i] = std::abs(z);
        c.log_size[i] = 0.0;
        c.log_pi[i] = z * log_ratio;
    }
    c.start = max_dist;
    derive_log_rows(c);
    return c;
}

LumpedChain hammock_level_chain(const Rational& stay, int max_level) {
    // states: tree generation g -> g (0..M); spine k -> M+1+k (0..M-1)
    LumpedChain c;
    int M = max_level;
    int S = (M + 1) + M;
    bool exact = M <= 256;  // spine degrees blow up as 4^k; exact rows only when cheap
    c.rows_log.resize(S);
    if (exact) c.rows_exact.resize(S);
    c.level.resize(S);
    c.log_size.resize(S);
    c.log_pi.resize(S);
    auto tree = [&](int g) { return g; };
    auto spine = [&](int k) { return M + 1 + k; };
    const double l4 = std::log(4.0);

    double lstay = stay == 0 ? kLogZero : rational_log(stay);
    Rational move = 1 - stay;
    double lmove = rational_log(move);

    auto push = [&](int from, int to, const Rational& p_exact, double logp) {
        c.rows_log[from].emplace_back(to, logp + lmove);
        if (exact) c.rows_exact[from].emplace_back(to, move * p_exact);
    };
    auto push_stay = [&](int s) {
        if (stay > 0) {
            c.rows_log[s].emplace_back(s, lstay);
            if (exact) c.rows_exact[s].emplace_back(s, stay);
        }
    };

    for (int g = 0; g <= M; ++g) {
        int s = tree(g);
        push_stay(s);
        if (g == 0) {
            if (1 <= M) push(s, tree(1), Rational(4, 5), std::log(4.0 / 5.0));
            push(s, spine(0), Rational(1, 5), std::log(1.0 / 5.0));
        } else {
            push(s, tree(g - 1), Rational(1, 7), std::log(1.0 / 7.0));
            if (g + 1 <= M) push(s, tree(g + 1), Rational(4, 7), std::log(4.0 / 7.0));
            push(s, spine(g - 1), Rational(1, 7), std::log(1.0 / 7.0));
            if (g <= M - 1) push(s, spine(g), Rational(1, 7), std::log(1.0 / 7.0));
        }
        c.level[s] = g;
        c.log_size[s] = g * l4;
        c.log_pi[s] = c.log_size[s] + std::log(g == 0 ? 5.0 : 7.0);
    }
    for (int k = 0; k <= M - 1; ++k) {
        int s = spine(k);
        push_stay(s);
        if (k == 0) {
            if (1 <= M - 1) push(s, spine(1), Rational(1, 6), std::log(1.0 / 6.0));
            push(s, tree(0), Rational(1, 6), std::log(1.0 / 6.0));
            push(s, tree(1), Rational(4, 6), std::log(4.0 / 6.0));
            c.log_pi[s] = std::log(6.0);
        } else {
            // degree 2 + 4^k + 4^{k+1}: log computed without overflow
            double logdeg = k * l4 + std::log(5.0 + 2.0 * std::pow(4.0, -double(k)));
            BigInt p4k = BigInt(1) << (2 * k);
            BigInt deg = 2 + p4k + 4 * p4k;
            push(s, spine(k - 1), Rational(1, deg), -logdeg);
            if (k + 1 <= M - 1) push(s, spine(k + 1), Rational(1, deg), -logdeg);
            push(s, tree(k), Rational(p4k, deg), k * l4 - logdeg);
            if (k + 1 <= M) push(s, tree(k + 1), Rational(4 * p4k, deg), (k + 1) * l4 - logdeg);
            c.log_pi[s] = logdeg;
        }
        c.level[s] = k + 1;
        c.log_size[s] = 0.0;
    }
    c.start = tree(0);
    return c;
}

LumpedChain glued_chain(const std::vector<std::pair<LumpedChain, Rational>>& parts) {
    LumpedChain out;
    // state 0: shared origin; part p's non-start states follow with offsets
    std::vector<std::vector<std::int32_t>> remap(parts.size());
    std::size_t total = 1;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto& c = parts[p].first;
        remap[p].assign(c.size(), -1);
        for (std::size_t s = 0; s < c.size(); ++s) {
            if (static_cast<std::int32_t>(s) == c.start) {
                remap[p][s] = 0;
            } else {
                remap[p][s] = static_cast<std::int32_t>(total++);
            }
        }
    }
    out.rows_log.resize(total);
    out.level.assign(total, 0);
    out.log_size.assign(total, 0.0);
    out.log_pi.assign(total, 0.0);
    out.start = 0;

    bool exact = true;
    for (const auto& [c, w] : parts) exact = exact && c.has_exact();
    if (exact) out.rows_exact.resize(total);

    double origin_pi = kLogZero;  // log sum of part basepoint measures
    for (const auto& [c, w] : parts)
        origin_pi = log_add(origin_pi, 0.0);  // each rescaled basepoint measure is 1 * deg-share
    // simpler: measure normalised so the origin carries mass 1
    origin_pi = 0.0;

    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto& c = parts[p].first;
        const Rational& w = parts[p].second;
        double lw = std::log(to_double(w));
        auto start = static_cast<std::size_t>(c.start);
        for (std::size_t s = 0; s < c.size(); ++s) {
            std::int32_t from = remap[p][s];
            bool from_origin = (from == 0);
            for (std::size_t e = 0; e < c.rows_log[s].size(); ++e) {
                auto [t, lp] = c.rows_log[s][e];
                std::int32_t to = remap[p][static_cast<std::size_t>(t)];
                double logp = from_origin ? lp + lw : lp;
                out.rows_log[from].emplace_back(to, logp);
                if (exact) {
                    Rational pe = c.rows_exact[s][e].second;
                    out.rows_exact[from].emplace_back(to, from_origin ? pe * w : pe);
                }
            }
            if (!from_origin) {
                out.level[from] = c.level[s];
                out.log_size[from] = c.log_size[s];
                // rescale so the part's basepoint class carries the part's
                // weight share of the origin measure
                out.log_pi[from] = c.log_pi[s] - c.log_pi[start] + std::log(to_double(w));
            }
        }
    }
    out.log_pi[0] = origin_pi;
    return out;
}

std::int32_t TwoCenterChain::index(int t, int l) const {
    return static_cast<std::int32_t>(t * (max_l + 1) + l);
}

TwoCenterChain two_center_tree_chain(int degree, int D, int max_l) {
    TwoCenterChain tc;
    tc.D = D;
    tc.max_l = max_l;
    LumpedChain& c = tc.chain;
    int S = (D + 1) * (max_l + 1);
    c.rows_exact.resize(S);
    c.level.resize(S);
    c.log_size.resize(S);
    c.log_pi.resize(S);
    const int d = degree;
    const double ld1 = std::log(double(d - 1));

    // off-geodesic branching factor at geodesic point t
    auto branches = [&](int t) -> int {
        if (D == 0) return d;
        return (t == 0 || t == D) ? d - 1 : d - 2;
    };

    for (int t = 0; t <= D; ++t) {
        for (int l = 0; l <= max_l; ++l) {
            int s = tc.index(t, l);
            auto& row = c.rows_exact[s];
            if (l == 0) {
                if (t > 0) row.emplace_back(tc.index(t - 1, 0), Rational(1, d));
                if (t < D) row.emplace_back(tc.index(t + 1, 0), Rational(1, d));
                if (branches(t) > 0 && 1 <= max_l)
                    row.emplace_back(tc.index(t, 1), Rational(branches(t), d));
            } else {
                row.emplace_back(tc.index(t, l - 1), Rational(1, d));
                if (l + 1 <= max_l) row.emplace_back(tc.index(t, l + 1), Rational(d - 1, d));
            }
            c.level[s] = t + l;  // distance from the first marked vertex
            c.log_size[s] = l == 0 ? 0.0 : std::log(double(branches(t))) + (l - 1) * ld1;
            c.log_pi[s] = c.log_size[s];
        }
    }
    tc.start_a = tc.index(0, 0);
    tc.start_b = tc.index(D, 0);
    c.start = tc.start_a;
    derive_log_rows(c);
    return tc;
}

std::vector<double> chain_return_log(const LumpedChain& chain, int N) {
    std::vector<double> cur(chain.size(), kLogZero), next(chain.size(), kLogZero);
    cur[static_cast<std::size_t>(chain.start)] = 0.0;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(N) + 1);
    out.push_back(0.0);
    for (int n = 1; n <= N; ++n) {
        std::fill(next.begin(), next.end(), kLogZero);
        for (std::size_t s = 0; s < chain.size(); ++s) {
            double mass = cur[s];
            if (log_is_zero(mass)) continue;
            for (const auto& [t, lp] : chain.rows_log[s])
                next[static_cast<std::size_t>(t)] =
                    log_add(next[static_cast<std::size_t>(t)], mass + lp);
        }
        std::swap(cur, next);
        out.push_back(cur[static_cast<std::size_t>(chain.start)]);
    }
    return out;
}

std::vector<Rational> chain_return_exact(const LumpedChain& chain, int N) {
    if (!chain.has_exact())
        throw ResourceError("exact rows not available for this chain size; use float mode");
    std::vector<Rational> cur(chain.size(), Rational(0)), next(chain.size(), Rational(0));
    cur[static_cast<std::size_t>(chain.start)] = 1;
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(N) + 1);
    out.emplace_back(1);
    for (int n = 1; n <= N; ++n) {
        std::fill(next.begin(), next.end(), Rational(0));
        for (std::size_t s = 0; s < chain.size(); ++s) {
            if (cur[s] == 0) continue;
            for (const auto& [t, p] : chain.rows_exact[s])
                next[static_cast<std::size_t>(t)] += cur[s] * p;
        }
        std::swap(cur, next);
        out.push_back(cur[static_cast<std::size_t>(chain.start)]);
    }
    return out;
}

std::vector<std::vector<double>> chain_step_vectors(const LumpedChain& chain, std::int32_t start,
                                                    int N) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(N) + 1);
    std::vector<double> cur(chain.size(), 0.0);
    cur[static_cast<std::size_t>(start)] = 1.0;
    out.push_back(cur);
    std::vector<double> next(chain.size(), 0.0);
    for (int n = 1; n <= N; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < chain.size(); ++s) {
            double mass = cur[s];
            if (mass == 0.0) continue;
            for (const auto& [t, lp] : chain.rows_log[s])
                next[static_cast<std::size_t>(t)] += mass * std::exp(lp);
        }
        std::swap(cur, next);
        out.push_back(cur);
    }
    return out;
}

namespace {

PowerIterResult power_iterate(std::vector<std::vector<std::pair<std::int32_t, double>>>& sym_rows,
                              int max_iters, double tol) {
    PowerIterResult res;
    std::size_t S = sym_rows.size();
    res.states = S;
    if (S == 0) return res;

    // shift by the identity: keeps the Perron pair dominant on bipartite balls
    std::vector<double> v(S, 1.0 / std::sqrt(double(S))), w(S, 0.0);
    double rayleigh = 0.0, prev = -1.0;
    int stable = 0;
    for (int it = 0; it < max_iters; ++it) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            double acc = v[s];  // identity shift
            for (const auto& [t, a] : sym_rows[s]) acc += a * v[static_cast<std::size_t>(t)];
            w[s] = acc;
        }
        double num = 0.0, den = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            num += v[s] * w[s];
            den += v[s] * v[s];
        }
        rayleigh = num / den - 1.0;
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t s = 0; s < S; ++s) v[s] = w[s] / norm;
        res.iterations = it + 1;
        res.delta = std::abs(rayleigh - prev);
        if (res.delta < tol) {
            if (++stable >= 8) {
                res.converged = true;
                break;
            }
        } else {
            stable = 0;
        }
        prev = rayleigh;
    }
    res.value = rayleigh;
    return res;
}

} // namespace

PowerIterResult dirichlet_power_iteration(const LumpedChain& chain, std::int64_t radius,
                                          int max_iters, double tol) {
    // keep classes with level <= radius, renumber, symmetrise with sqrt(pi)
    std::vector<std::int32_t> keep(chain.size(), -1);
    std::vector<std::size_t> states;
    for (std::size_t s = 0; s < chain.size(); ++s) {
        if (chain.level[s] <= radius) {
            keep[s] = static_cast<std::int32_t>(states.size());
            states.push_back(s);
        }
    }
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        std::size_t s = states[i];
        for (const auto& [t, lp] : chain.rows_log[s]) {
            auto ts = static_cast<std::size_t>(t);
            if (keep[ts] < 0) continue;
            double a = std::exp(lp + 0.5 * (chain.log_pi[s] - chain.log_pi[ts]));
            rows[i].emplace_back(keep[ts], a);
        }
    }
    return power_iterate(rows, max_iters, tol);
}

PowerIterResult dirichlet_power_iteration_csr(
    const std::vector<std::vector<std::pair<std::int32_t, double>>>& plain_rows,
    const std::vector<double>& log_pi, int max_iters, double tol) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(plain_rows.size());
    for (std::size_t s = 0; s < plain_rows.size(); ++s) {
        for (const auto& [t, p] : plain_rows[s]) {
            double a = p * std::exp(0.5 * (log_pi[s] - log_pi[static_cast<std::size_t>(t)]));
            rows[s].emplace_back(t, a);
        }
    }
    return power_iterate(rows, max_iters, tol);
}

} // namespace brwlab
