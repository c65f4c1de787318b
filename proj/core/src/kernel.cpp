#include "brwlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "brwlab/sparse_dp.hpp"

namespace brwlab {

bool LazySpec::operator==(const LazySpec& o) const { return base == o.base && stay == o.stay; }
bool ProductKernelSpec::operator==(const ProductKernelSpec& o) const {
    return factors == o.factors;
}

KernelSpec simple_kernel() { return KernelSpec(SimpleSpec{}); }

KernelSpec lazy_kernel(KernelSpec base, Rational stay) {
    LazySpec l;
    l.base.push_back(std::move(base));
    l.stay = std::move(stay);
    return KernelSpec(std::move(l));
}

KernelSpec biased_line_kernel(Rational p) { return KernelSpec(BiasedLineSpec{std::move(p)}); }
KernelSpec height_biased_kernel(Rational p) { return KernelSpec(HeightBiasedSpec{std::move(p)}); }

KernelSpec product_kernel(std::vector<std::pair<KernelSpec, Rational>> factors) {
    return KernelSpec(ProductKernelSpec{std::move(factors)});
}

namespace {

void require_prob_open(const Rational& p, const char* what) {
    if (p <= 0 || p >= 1) throw ConfigError(std::string(what) + " must lie strictly in (0,1)");
}

bool bipartite(const GraphFamily& g) {
    return std::visit(
        [](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree> || std::is_same_v<T, Line>) {
                return true;
            } else if constexpr (std::is_same_v<T, Hammock>) {
                return false;  // root, spine 0 and a generation-1 vertex form a triangle
            } else if constexpr (std::is_same_v<T, Product>) {
                for (const auto& f : x.factors)
                    if (!bipartite(f)) return false;
                return true;
            } else {
                for (const auto& p : x.parts)
                    if (!bipartite(p)) return false;
                return true;
            }
        },
        g.g);
}

// log degree, usable for hammock spine indices far beyond 64-bit range
double log_degree(const GraphFamily& g, const VertexAddr& a) {
    if (const auto* h = std::get_if<HammockAddr>(&a.v); h && h->is_spine() && h->spine > 30) {
        double k = static_cast<double>(h->spine);
        return k * std::log(4.0) + std::log(5.0 + 2.0 * std::pow(4.0, -k));
    }
    if (const auto* p = std::get_if<ProductAddr>(&a.v)) {
        const auto& prod = std::get<Product>(g.g);
        double d = 0;
        for (std::size_t i = 0; i < prod.factors.size(); ++i)
            d += static_cast<double>(degree_of(prod.factors[i], p->factors[i]));
        return std::log(d);
    }
    return std::log(static_cast<double>(degree_of(g, a)));
}

} // namespace

Kernel::Kernel(KernelSpec spec, GraphFamily graph)
    : spec_(std::move(spec)), graph_(std::move(graph)) {
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SimpleSpec>) {
                // any family
            } else if constexpr (std::is_same_v<T, LazySpec>) {
                require_prob_open(k.stay, "lazy stay probability");
                children_.push_back(
                    std::make_shared<const Kernel>(k.base.front(), graph_));
            } else if constexpr (std::is_same_v<T, BiasedLineSpec>) {
                require_prob_open(k.p, "bias p");
                if (!std::holds_alternative<Line>(graph_.g))
                    throw ConfigError("biased line kernel requires the line graph");
            } else if constexpr (std::is_same_v<T, HeightBiasedSpec>) {
                require_prob_open(k.p, "bias p");
                const auto* t = std::get_if<HomTree>(&graph_.g);
                if (!t || t->degree != 3)
                    throw ConfigError("height-biased kernel requires t(3) with the spine embedding");
            }
        },
        spec_.k);
    if (const auto* pk = std::get_if<ProductKernelSpec>(&spec_.k)) {
        const auto* prod = std::get_if<Product>(&graph_.g);
        if (!prod) throw ConfigError("product kernel requires a product graph");
        if (pk->factors.size() != prod->factors.size())
            throw ConfigError("product kernel arity does not match the product graph");
        Rational total = 0;
        for (const auto& [fspec, w] : pk->factors) {
            if (w < 0) throw ConfigError("product kernel weights must be nonnegative");
            total += w;
        }
        double gap = std::abs(to_double(total) - 1.0);
        if (gap > 1e-12) throw ConfigError("product kernel weights must sum to 1");
        if (total != 1)
            throw ConfigError("product kernel weights must sum to exactly 1 (use fractions)");
        for (std::size_t i = 0; i < pk->factors.size(); ++i)
            children_.push_back(
                std::make_shared<const Kernel>(pk->factors[i].first, prod->factors[i]));
    }
}

Kernel build_kernel(KernelSpec spec, GraphFamily graph) {
    return Kernel(std::move(spec), std::move(graph));
}

Rational Kernel::stay_mass(const VertexAddr& v) const {
    return std::visit(
        [&](const auto& k) -> Rational {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, LazySpec>) {
                return k.stay + (1 - k.stay) * children_[0]->stay_mass(v);
            } else if constexpr (std::is_same_v<T, ProductKernelSpec>) {
                const auto& p = std::get<ProductAddr>(v.v);
                Rational s = 0;
                for (std::size_t i = 0; i < children_.size(); ++i)
                    s += k.factors[i].second * children_[i]->stay_mass(p.factors[i]);
                return s;
            } else {
                return 0;
            }
        },
        spec_.k);
}

TransitionRow Kernel::step_distribution(const VertexAddr& v) const {
    validate_address(graph_, v);
    TransitionRow row;
    row.source = v;
    Rational stay = stay_mass(v);
    if (stay > 0) row.probs.emplace_back(v, stay);

    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SimpleSpec>) {
                auto nb = neighbors(graph_, v);
                Rational p(1, static_cast<BigInt>(nb.size()));
                for (auto& u : nb) row.probs.emplace_back(std::move(u), p);
            } else if constexpr (std::is_same_v<T, LazySpec>) {
                auto base = children_[0]->step_distribution(v);
                Rational keep = 1 - k.stay;
                for (auto& [u, p] : base.probs) {
                    if (u == v) continue;  // folded into the stay mass
                    row.probs.emplace_back(std::move(u), keep * p);
                }
            } else if constexpr (std::is_same_v<T, BiasedLineSpec>) {
                auto z = std::get<LineInt>(v.v).z;
                row.probs.emplace_back(VertexAddr(LineInt{z - 1}), 1 - k.p);
                row.probs.emplace_back(VertexAddr(LineInt{z + 1}), k.p);
            } else if constexpr (std::is_same_v<T, HeightBiasedSpec>) {
                const auto& w = std::get<TreeWord>(v.v);
                std::int64_t h = height(w);
                Rational up = k.p;
                Rational down = (1 - k.p) / 2;
                for (auto& u : neighbors(graph_, v)) {
                    std::int64_t hu = height(std::get<TreeWord>(u.v));
                    row.probs.emplace_back(std::move(u), hu == h + 1 ? up : down);
                }
            } else {
                const auto& pa = std::get<ProductAddr>(v.v);
                for (std::size_t i = 0; i < children_.size(); ++i) {
                    auto factor_row = children_[i]->step_distribution(pa.factors[i]);
                    for (auto& [u, p] : factor_row.probs) {
                        if (u == pa.factors[i]) continue;  // factor stay, aggregated above
                        ProductAddr q = pa;
                        q.factors[i] = std::move(u);
                        row.probs.emplace_back(VertexAddr(std::move(q)),
                                               k.factors[i].second * p);
                    }
                }
            }
        },
        spec_.k);

    // Strictly positive targets only (a zero-weight product factor contributes none).
    std::erase_if(row.probs, [](const auto& e) { return e.second == 0; });
    return row;
}

std::vector<std::pair<VertexAddr, double>> Kernel::step_distribution_double(
    const VertexAddr& v) const {
    auto row = step_distribution(v);
    std::vector<std::pair<VertexAddr, double>> out;
    out.reserve(row.probs.size());
    for (auto& [u, p] : row.probs) out.emplace_back(std::move(u), to_double(p));
    return out;
}

// --------------------------------------------------------------------------
// Sampled stepping.

namespace {

// Multinomial dispatch by sequential binomials over (prob, handler) classes.
template <class Handler>
void multinomial_classes(std::uint64_t n, const std::vector<double>& probs,
                         std::mt19937_64& eng, Handler&& handle) {
    double rest = 0;
    for (double p : probs) rest += p;
    std::uint64_t left = n;
    for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
        double q = probs[i] / rest;
        std::uint64_t c;
        if (q >= 1.0 || i + 1 == probs.size()) {
            c = left;
        } else {
            std::binomial_distribution<std::uint64_t> bin(left, q);
            c = bin(eng);
        }
        if (c > 0) handle(i, c);
        left -= c;
        rest -= probs[i];
        if (rest <= 0) break;
    }
}

TreeWord random_word(std::int64_t length, std::mt19937_64& eng) {
    TreeWord w;
    w.letters.reserve(static_cast<std::size_t>(length));
    std::uniform_int_distribution<int> letter(0, 3);
    for (std::int64_t i = 0; i < length; ++i)
        w.letters.push_back(static_cast<std::uint8_t>(letter(eng)));
    return w;
}

using CountRow = std::vector<std::pair<VertexAddr, std::uint64_t>>;

// n independent uniform picks from the neighbour set, returned as counts.
// Only the hammock spine needs care: its row is grouped into four classes
// (spine down, spine up, generation k, generation k+1) that the full row is
// uniform on, so class counts plus uniform random words reproduce the
// multinomial over the full row exactly.
void sample_uniform_neighbors(const GraphFamily& g, const VertexAddr& v, std::uint64_t n,
                              std::mt19937_64& eng, CountRow& out);

void sample_hammock_spine(std::int64_t k, std::uint64_t n, std::mt19937_64& eng, CountRow& out) {
    double p4k = std::pow(4.0, static_cast<double>(k));
    double deg = (k >= 1 ? 2.0 : 1.0) + (k >= 1 ? p4k : 1.0) + 4.0 * p4k;
    // classes: [spine k-1 | root if k==0], spine k+1, gen k (k>=1), gen k+1
    std::vector<double> probs;
    if (k >= 1) {
        probs = {1.0 / deg, 1.0 / deg, p4k / deg, 4.0 * p4k / deg};
    } else {
        probs = {1.0 / 6.0, 1.0 / 6.0, 4.0 / 6.0};  // root, spine 1, gen 1
    }
    std::map<VertexAddr, std::uint64_t> acc;
    auto emit_words = [&](std::int64_t gen, std::uint64_t c) {
        for (std::uint64_t i = 0; i < c; ++i)
            acc[VertexAddr(HammockAddr{-1, random_word(gen, eng)})] += 1;
    };
    multinomial_classes(n, probs, eng, [&](std::size_t cls, std::uint64_t c) {
        if (k >= 1) {
            switch (cls) {
                case 0: acc[VertexAddr(HammockAddr{k - 1, {}})] += c; break;
                case 1: acc[VertexAddr(HammockAddr{k + 1, {}})] += c; break;
                case 2: emit_words(k, c); break;
                default: emit_words(k + 1, c); break;
            }
        } else {
            switch (cls) {
                case 0: acc[VertexAddr(HammockAddr{-1, {}})] += c; break;
                case 1: acc[VertexAddr(HammockAddr{1, {}})] += c; break;
                default: emit_words(1, c); break;
            }
        }
    });
    for (auto& [u, c] : acc) out.emplace_back(u, c);
}

void sample_uniform_neighbors(const GraphFamily& g, const VertexAddr& v, std::uint64_t n,
                              std::mt19937_64& eng, CountRow& out) {
    if (const auto* h = std::get_if<HammockAddr>(&v.v); h && h->is_spine()) {
        sample_hammock_spine(h->spine, n, eng, out);
        return;
    }
    if (const auto* prod = std::get_if<Product>(&g.g)) {
        const auto& pa = std::get<ProductAddr>(v.v);
        std::vector<double> degs(prod->factors.size());
        double total = 0;
        for (std::size_t i = 0; i < prod->factors.size(); ++i) {
            degs[i] = std::exp(log_degree(prod->factors[i], pa.factors[i]));
            total += degs[i];
        }
        for (auto& d : degs) d /= total;
        multinomial_classes(n, degs, eng, [&](std::size_t i, std::uint64_t c) {
            CountRow inner;
            sample_uniform_neighbors(prod->factors[i], pa.factors[i], c, eng, inner);
            for (auto& [u, cnt] : inner) {
                ProductAddr q = pa;
                q.factors[i] = std::move(u);
                out.emplace_back(VertexAddr(std::move(q)), cnt);
            }
        });
        return;
    }
    if (const auto* gl = std::get_if<Glued>(&g.g)) {
        const auto& ga = std::get<GluedAddr>(v.v);
        bool at_origin = (ga.local.front() == gl->basepoints[ga.part]);
        auto wrap = [&](std::size_t part, CountRow&& inner) {
            for (auto& [u, cnt] : inner) {
                if (u == gl->basepoints[part]) {
                    out.emplace_back(origin(g), cnt);
                } else {
                    GluedAddr q{part, {std::move(u)}};
                    out.emplace_back(VertexAddr(std::move(q)), cnt);
                }
            }
        };
        if (at_origin) {
            std::vector<double> degs(gl->parts.size());
            double total = 0;
            for (std::size_t p = 0; p < gl->parts.size(); ++p) {
                degs[p] = std::exp(log_degree(gl->parts[p], gl->basepoints[p]));
                total += degs[p];
            }
            for (auto& d : degs) d /= total;
            multinomial_classes(n, degs, eng, [&](std::size_t p, std::uint64_t c) {
                CountRow inner;
                sample_uniform_neighbors(gl->parts[p], gl->basepoints[p], c, eng, inner);
                wrap(p, std::move(inner));
            });
        } else {
            CountRow inner;
            sample_uniform_neighbors(gl->parts[ga.part], ga.local.front(), n, eng, inner);
            wrap(ga.part, std::move(inner));
        }
        return;
    }
    // small rows: materialise
    auto nb = neighbors(g, v);
    std::vector<double> probs(nb.size(), 1.0 / static_cast<double>(nb.size()));
    multinomial_classes(n, probs, eng,
                        [&](std::size_t i, std::uint64_t c) { out.emplace_back(nb[i], c); });
}

} // namespace

void Kernel::sample_step_counts(const VertexAddr& v, std::uint64_t n, std::mt19937_64& eng,
                                CountRow& out) const {
    if (n == 0) return;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SimpleSpec>) {
                sample_uniform_neighbors(graph_, v, n, eng, out);
            } else if constexpr (std::is_same_v<T, LazySpec>) {
                std::binomial_distribution<std::uint64_t> bin(n, to_double(k.stay));
                std::uint64_t stay = bin(eng);
                if (stay > 0) out.emplace_back(v, stay);
                children_[0]->sample_step_counts(v, n - stay, eng, out);
            } else if constexpr (std::is_same_v<T, ProductKernelSpec>) {
                const auto& pa = std::get<ProductAddr>(v.v);
                std::vector<double> weights;
                weights.reserve(k.factors.size());
                for (const auto& [s, w] : k.factors) weights.push_back(to_double(w));
                multinomial_classes(n, weights, eng, [&](std::size_t i, std::uint64_t c) {
                    CountRow inner;
                    children_[i]->sample_step_counts(pa.factors[i], c, eng, inner);
                    for (auto& [u, cnt] : inner) {
                        ProductAddr q = pa;
                        q.factors[i] = std::move(u);
                        out.emplace_back(VertexAddr(std::move(q)), cnt);
                    }
                });
            } else {
                // biased line / height biased: three-entry rows at most
                auto row = step_distribution_double(v);
                std::vector<double> probs;
                probs.reserve(row.size());
                for (const auto& [u, p] : row) probs.push_back(p);
                multinomial_classes(n, probs, eng, [&](std::size_t i, std::uint64_t c) {
                    out.emplace_back(row[i].first, c);
                });
            }
        },
        spec_.k);
}

int Kernel::period() const {
    return std::visit(
        [&](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, LazySpec>) {
                return 1;
            } else if constexpr (std::is_same_v<T, ProductKernelSpec>) {
                for (const auto& child : children_)
                    if (child->period() == 1) return 1;
                return 2;
            } else {
                return bipartite(graph_) ? 2 : 1;
            }
        },
        spec_.k);
}

double Kernel::log_reversing_measure(const VertexAddr& v) const {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SimpleSpec>) {
                return log_degree(graph_, v) - log_degree(graph_, origin(graph_));
            } else if constexpr (std::is_same_v<T, LazySpec>) {
                return children_[0]->log_reversing_measure(v);
            } else if constexpr (std::is_same_v<T, BiasedLineSpec>) {
                double z = static_cast<double>(std::get<LineInt>(v.v).z);
                double p = to_double(k.p);
                return z * std::log(p / (1 - p));
            } else if constexpr (std::is_same_v<T, HeightBiasedSpec>) {
                double h = static_cast<double>(height(std::get<TreeWord>(v.v)));
                double p = to_double(k.p);
                return h * std::log(2 * p / (1 - p));
            } else {
                const auto& pa = std::get<ProductAddr>(v.v);
                double s = 0;
                for (std::size_t i = 0; i < children_.size(); ++i)
                    s += children_[i]->log_reversing_measure(pa.factors[i]);
                return s;
            }
        },
        spec_.k);
}

bool Kernel::is_simple_based() const {
    if (std::holds_alternative<SimpleSpec>(spec_.k)) return true;
    if (std::holds_alternative<LazySpec>(spec_.k)) return children_[0]->is_simple_based();
    return false;
}

std::optional<ProductKernelSpec> as_product_form(const KernelSpec& spec, const GraphFamily& g) {
    if (const auto* pk = std::get_if<ProductKernelSpec>(&spec.k)) return *pk;
    if (!std::holds_alternative<SimpleSpec>(spec.k)) return std::nullopt;
    const auto* prod = std::get_if<Product>(&g.g);
    if (!prod) return std::nullopt;
    BigInt total = 0;
    std::vector<BigInt> degs;
    for (const auto& f : prod->factors) {
        if (const auto* t = std::get_if<HomTree>(&f.g)) {
            degs.push_back(t->degree);
        } else if (std::holds_alternative<Line>(f.g)) {
            degs.push_back(2);
        } else {
            return std::nullopt;  // non-regular factor: no product form
        }
        total += degs.back();
    }
    ProductKernelSpec out;
    for (std::size_t i = 0; i < degs.size(); ++i)
        out.factors.emplace_back(simple_kernel(), Rational(degs[i], total));
    return out;
}

// --------------------------------------------------------------------------
// Degree-weighted detailed balance check.

ReversibilityReport reversibility_check(const Kernel& kernel, int horizon, std::int64_t radius) {
    if (!kernel.is_simple_based())
        throw ConfigError("reversibility check supports simple and lazy-simple kernels");
    const GraphFamily& g = kernel.graph();
    auto ball_vertices = ball(g, radius);

    // DP only from orbit representatives; any ordered pair (i, j) is read off
    // through an automorphism sending i to its representative.
    std::vector<VertexAddr> reps;
    {
        std::unordered_map<VertexAddr, bool, AddrHash> seen;
        for (const auto& v : ball_vertices) {
            auto c = canonical_vertex(g, v);
            if (!seen[c]) {
                seen[c] = true;
                reps.push_back(c);
            }
        }
    }

    // Paths from a ball vertex back into the ball in <= horizon steps never
    // leave radius + horizon/2 (tightened per step below).
    auto row_of = [&](const VertexAddr& v) { return kernel.step_distribution(v).probs; };

    // per-rep, per-step distribution tables
    std::unordered_map<VertexAddr, std::vector<DistVector<Rational>>, AddrHash> tables;
    for (const auto& rep : reps) {
        std::vector<DistVector<Rational>> steps;
        DistVector<Rational> cur;
        cur[rep] = 1;
        steps.push_back(cur);
        for (int m = 1; m <= horizon; ++m) {
            // must end within the ball by step `horizon`, so the excursion at
            // step m is capped both ways
            SparseDpLimits limits;
            limits.radius_cap = std::min<std::int64_t>(radius + m, radius + (horizon - m));
            limits.support_cap = 8'000'000;
            cur = sparse_dp_step(g, cur, row_of, limits);
            steps.push_back(cur);
        }
        tables.emplace(rep, std::move(steps));
    }

    auto prob = [&](const VertexAddr& from, const VertexAddr& to, int m) -> Rational {
        auto [rep, img] = canonical_pair(g, from, to);
        const auto& steps = tables.at(rep);
        return mass_at(steps[static_cast<std::size_t>(m)], img);
    };

    ReversibilityReport report;
    report.horizon = horizon;
    report.radius = radius;
    double max_ratio = 1.0;
    for (const auto& i : ball_vertices) {
        Rational deg_i = static_cast<BigInt>(degree_of(g, i));
        for (const auto& j : ball_vertices) {
            Rational deg_j = static_cast<BigInt>(degree_of(g, j));
            for (int m = 1; m <= horizon; ++m) {
                Rational pij = prob(i, j, m);
                Rational pji = prob(j, i, m);
                if (deg_i * pij != deg_j * pji)
                    throw InternalConsistencyError(
                        "detailed balance violated at pair " + to_string(i) + ", " +
                        to_string(j) + " horizon " + std::to_string(m));
                if (pji > 0 && pij > 0)
                    max_ratio = std::max(max_ratio, to_double(Rational(pij / pji)));
                ++report.pairs_checked;
            }
        }
    }
    report.max_ratio = max_ratio;
    return report;
}

std::string kernel_to_string(const KernelSpec& spec) {
    std::ostringstream os;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SimpleSpec>) {
                os << "simple";
            } else if constexpr (std::is_same_v<T, LazySpec>) {
                os << "lazy(" << kernel_to_string(k.base.front()) << ","
                   << rational_to_string(k.stay) << ")";
            } else if constexpr (std::is_same_v<T, BiasedLineSpec>) {
                os << "biasedline(" << rational_to_string(k.p) << ")";
            } else if constexpr (std::is_same_v<T, HeightBiasedSpec>) {
                os << "heightbiased(" << rational_to_string(k.p) << ")";
            } else {
                os << "product(";
                for (std::size_t i = 0; i < k.factors.size(); ++i) {
                    if (i) os << ", ";
                    os << rational_to_string(k.factors[i].second) << ": "
                       << kernel_to_string(k.factors[i].first) << "@" << (i + 1);
                }
                os << ")";
            }
        },
        spec.k);
    return os.str();
}

} // namespace brwlab
