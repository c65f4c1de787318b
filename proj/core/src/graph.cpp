#include "brwlab/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "brwlab/errors.hpp"

namespace brwlab {

bool Product::operator==(const Product& o) const { return factors == o.factors; }
bool Glued::operator==(const Glued& o) const {
    return parts == o.parts && basepoints == o.basepoints;
}

GraphFamily hom_tree(int degree) {
    if (degree < 3) throw ConfigError("homogeneous tree requires degree >= 3");
    return GraphFamily(HomTree{degree});
}

GraphFamily line() { return GraphFamily(Line{}); }
GraphFamily hammock() { return GraphFamily(Hammock{}); }

GraphFamily product(std::vector<GraphFamily> factors) {
    if (factors.size() < 2) throw ConfigError("product needs at least two factors");
    return GraphFamily(Product{std::move(factors)});
}

GraphFamily glue(std::vector<GraphFamily> parts, std::vector<VertexAddr> basepoints) {
    if (parts.empty()) throw ConfigError("glue needs at least one part");
    if (parts.size() != basepoints.size())
        throw ConfigError("glue: one basepoint per part required");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        validate_address(parts[i], basepoints[i]);
        if (basepoints[i] != origin(parts[i]))
            throw ConfigError("glue: only origin basepoints are supported");
    }
    return GraphFamily(Glued{std::move(parts), std::move(basepoints)});
}

VertexAddr origin(const GraphFamily& g) {
    return std::visit(
        [](const auto& x) -> VertexAddr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                return VertexAddr(TreeWord{});
            } else if constexpr (std::is_same_v<T, Line>) {
                return VertexAddr(LineInt{0});
            } else if constexpr (std::is_same_v<T, Hammock>) {
                return VertexAddr(HammockAddr{-1, {}});
            } else if constexpr (std::is_same_v<T, Product>) {
                ProductAddr p;
                for (const auto& f : x.factors) p.factors.push_back(origin(f));
                return VertexAddr(std::move(p));
            } else {
                GluedAddr a;
                a.part = 0;
                a.local.push_back(x.basepoints.front());
                return VertexAddr(std::move(a));
            }
        },
        g.g);
}

namespace {

void check_word(const TreeWord& w, int root_fanout, int inner_fanout, const char* what) {
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        int fanout = (i == 0) ? root_fanout : inner_fanout;
        if (w.letters[i] >= fanout)
            throw AddressError(std::string("letter out of alphabet in ") + what + " word");
    }
}

// Hammock spine rows have 4^k + 4^{k+1} + 2 entries; materialisation is only
// sensible for small k.  Sampled stepping (kernel.cpp) has no such limit.
constexpr std::int64_t kMaxMaterialisedSpine = 10;

void gen_words(std::int64_t generation, std::vector<VertexAddr>& out) {
    TreeWord w;
    w.letters.assign(static_cast<std::size_t>(generation), 0);
    while (true) {
        out.push_back(VertexAddr(HammockAddr{-1, w}));
        // lexicographic successor in base 4
        std::size_t i = w.letters.size();
        while (i > 0 && w.letters[i - 1] == 3) {
            w.letters[i - 1] = 0;
            --i;
        }
        if (i == 0) break;
        ++w.letters[i - 1];
    }
}

} // namespace

void validate_address(const GraphFamily& g, const VertexAddr& a) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                const auto* w = std::get_if<TreeWord>(&a.v);
                if (!w) throw AddressError("expected a tree word");
                check_word(*w, x.degree, x.degree - 1, "tree");
            } else if constexpr (std::is_same_v<T, Line>) {
                if (!std::holds_alternative<LineInt>(a.v))
                    throw AddressError("expected a line coordinate");
            } else if constexpr (std::is_same_v<T, Hammock>) {
                const auto* h = std::get_if<HammockAddr>(&a.v);
                if (!h) throw AddressError("expected a hammock address");
                if (h->is_spine()) {
                    if (!h->word.letters.empty())
                        throw AddressError("spine address carries a tree word");
                } else {
                    check_word(h->word, 4, 4, "hammock");
                }
            } else if constexpr (std::is_same_v<T, Product>) {
                const auto* p = std::get_if<ProductAddr>(&a.v);
                if (!p) throw AddressError("expected a product tuple");
                if (p->factors.size() != x.factors.size())
                    throw AddressError("product address arity mismatch");
                for (std::size_t i = 0; i < x.factors.size(); ++i)
                    validate_address(x.factors[i], p->factors[i]);
            } else {
                const auto* ga = std::get_if<GluedAddr>(&a.v);
                if (!ga) throw AddressError("expected a glued address");
                if (ga->part >= x.parts.size()) throw AddressError("glued part out of range");
                validate_address(x.parts[ga->part], ga->local.front());
                if (ga->local.front() == x.basepoints[ga->part] && ga->part != 0)
                    throw AddressError("glued origin must be spelled as part 0's basepoint");
            }
        },
        g.g);
}

std::vector<VertexAddr> neighbors(const GraphFamily& g, const VertexAddr& a) {
    validate_address(g, a);
    std::vector<VertexAddr> out;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                const auto& w = std::get<TreeWord>(a.v);
                if (w.is_root()) {
                    for (int c = 0; c < x.degree; ++c) {
                        TreeWord child = w;
                        child.letters.push_back(static_cast<std::uint8_t>(c));
                        out.push_back(VertexAddr(std::move(child)));
                    }
                } else {
                    TreeWord parent = w;
                    parent.letters.pop_back();
                    out.push_back(VertexAddr(std::move(parent)));
                    for (int c = 0; c < x.degree - 1; ++c) {
                        TreeWord child = w;
                        child.letters.push_back(static_cast<std::uint8_t>(c));
                        out.push_back(VertexAddr(std::move(child)));
                    }
                }
            } else if constexpr (std::is_same_v<T, Line>) {
                auto z = std::get<LineInt>(a.v).z;
                out.push_back(VertexAddr(LineInt{z - 1}));
                out.push_back(VertexAddr(LineInt{z + 1}));
            } else if constexpr (std::is_same_v<T, Hammock>) {
                const auto& h = std::get<HammockAddr>(a.v);
                if (h.is_spine()) {
                    std::int64_t k = h.spine;
                    if (k > kMaxMaterialisedSpine)
                        throw ResourceError(
                            "hammock spine row too large to materialise; use sampled stepping");
                    if (k >= 1) out.push_back(VertexAddr(HammockAddr{k - 1, {}}));
                    out.push_back(VertexAddr(HammockAddr{k + 1, {}}));
                    gen_words(k, out);
                    gen_words(k + 1, out);
                } else {
                    std::int64_t gen = static_cast<std::int64_t>(h.word.depth());
                    if (gen >= 1) {
                        HammockAddr parent = h;
                        parent.word.letters.pop_back();
                        out.push_back(VertexAddr(std::move(parent)));
                    }
                    for (int c = 0; c < 4; ++c) {
                        HammockAddr child = h;
                        child.word.letters.push_back(static_cast<std::uint8_t>(c));
                        out.push_back(VertexAddr(std::move(child)));
                    }
                    if (gen >= 1) out.push_back(VertexAddr(HammockAddr{gen - 1, {}}));
                    out.push_back(VertexAddr(HammockAddr{gen, {}}));
                }
            } else if constexpr (std::is_same_v<T, Product>) {
                const auto& p = std::get<ProductAddr>(a.v);
                for (std::size_t i = 0; i < x.factors.size(); ++i) {
                    for (auto& u : neighbors(x.factors[i], p.factors[i])) {
                        ProductAddr q = p;
                        q.factors[i] = std::move(u);
                        out.push_back(VertexAddr(std::move(q)));
                    }
                }
            } else {
                const auto& ga = std::get<GluedAddr>(a.v);
                bool at_origin = (ga.local.front() == x.basepoints[ga.part]);
                if (at_origin) {
                    for (std::size_t p = 0; p < x.parts.size(); ++p) {
                        for (auto& u : neighbors(x.parts[p], x.basepoints[p])) {
                            GluedAddr n;
                            n.part = p;
                            n.local.push_back(std::move(u));
                            out.push_back(VertexAddr(std::move(n)));
                        }
                    }
                } else {
                    for (auto& u : neighbors(x.parts[ga.part], ga.local.front())) {
                        if (u == x.basepoints[ga.part]) {
                            out.push_back(origin(g));
                        } else {
                            GluedAddr n;
                            n.part = ga.part;
                            n.local.push_back(std::move(u));
                            out.push_back(VertexAddr(std::move(n)));
                        }
                    }
                }
            }
        },
        g.g);
    return out;
}

std::uint64_t degree_of(const GraphFamily& g, const VertexAddr& a) {
    validate_address(g, a);
    return std::visit(
        [&](const auto& x) -> std::uint64_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                return static_cast<std::uint64_t>(x.degree);
            } else if constexpr (std::is_same_v<T, Line>) {
                return 2;
            } else if constexpr (std::is_same_v<T, Hammock>) {
                const auto& h = std::get<HammockAddr>(a.v);
                if (!h.is_spine()) return h.word.is_root() ? 5 : 7;
                if (h.spine == 0) return 6;
                if (h.spine > 30) throw ResourceError("hammock spine degree exceeds 64 bits");
                std::uint64_t p4k = 1ULL << (2 * h.spine);
                return 2 + p4k + 4 * p4k;
            } else if constexpr (std::is_same_v<T, Product>) {
                const auto& p = std::get<ProductAddr>(a.v);
                std::uint64_t d = 0;
                for (std::size_t i = 0; i < x.factors.size(); ++i)
                    d += degree_of(x.factors[i], p.factors[i]);
                return d;
            } else {
                const auto& ga = std::get<GluedAddr>(a.v);
                if (ga.local.front() == x.basepoints[ga.part]) {
                    std::uint64_t d = 0;
                    for (std::size_t p = 0; p < x.parts.size(); ++p)
                        d += degree_of(x.parts[p], x.basepoints[p]);
                    return d;
                }
                return degree_of(x.parts[ga.part], ga.local.front());
            }
        },
        g.g);
}

std::int64_t ball_distance(const GraphFamily& g, const VertexAddr& a) {
    validate_address(g, a);
    return std::visit(
        [&](const auto& x) -> std::int64_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                return static_cast<std::int64_t>(std::get<TreeWord>(a.v).depth());
            } else if constexpr (std::is_same_v<T, Line>) {
                auto z = std::get<LineInt>(a.v).z;
                return z < 0 ? -z : z;
            } else if constexpr (std::is_same_v<T, Hammock>) {
                const auto& h = std::get<HammockAddr>(a.v);
                if (h.is_spine()) return h.spine + 1;
                return static_cast<std::int64_t>(h.word.depth());
            } else if constexpr (std::is_same_v<T, Product>) {
                const auto& p = std::get<ProductAddr>(a.v);
                std::int64_t d = 0;
                for (std::size_t i = 0; i < x.factors.size(); ++i)
                    d += ball_distance(x.factors[i], p.factors[i]);
                return d;
            } else {
                const auto& ga = std::get<GluedAddr>(a.v);
                return ball_distance(x.parts[ga.part], ga.local.front());
            }
        },
        g.g);
}

std::vector<VertexAddr> ball(const GraphFamily& g, std::int64_t radius) {
    std::vector<VertexAddr> out;
    std::unordered_set<VertexAddr, AddrHash> seen;
    std::queue<std::pair<VertexAddr, std::int64_t>> q;
    VertexAddr o = origin(g);
    seen.insert(o);
    q.emplace(o, 0);
    while (!q.empty()) {
        auto [v, d] = q.front();
        q.pop();
        out.push_back(v);
        if (d == radius) continue;
        for (auto& u : neighbors(g, v)) {
            if (seen.insert(u).second) q.emplace(std::move(u), d + 1);
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// Spine embedding and heights.

TreeWord spine_word(std::int64_t label) {
    TreeWord w;
    if (label > 0) {
        w.letters.assign(static_cast<std::size_t>(label), 0);
    } else if (label < 0) {
        w.letters.push_back(1);
        for (std::int64_t i = 1; i < -label; ++i) w.letters.push_back(0);
    }
    return w;
}

std::optional<std::int64_t> spine_label(const TreeWord& w) {
    if (w.is_root()) return 0;
    if (w.letters[0] == 0) {
        for (std::size_t i = 1; i < w.letters.size(); ++i)
            if (w.letters[i] != 0) return std::nullopt;
        return static_cast<std::int64_t>(w.letters.size());
    }
    if (w.letters[0] == 1) {
        for (std::size_t i = 1; i < w.letters.size(); ++i)
            if (w.letters[i] != 0) return std::nullopt;
        return -static_cast<std::int64_t>(w.letters.size());
    }
    return std::nullopt;
}

std::int64_t height(const TreeWord& w) {
    // The nearest spine vertex is the longest prefix of w lying on the spine;
    // under the fixed embedding it is unique, so no tie-break is needed.
    if (w.is_root()) return 0;
    std::size_t prefix_len = 0;
    std::int64_t label = 0;
    if (w.letters[0] == 0) {
        prefix_len = 1;
        while (prefix_len < w.letters.size() && w.letters[prefix_len] == 0) ++prefix_len;
        label = static_cast<std::int64_t>(prefix_len);
    } else if (w.letters[0] == 1) {
        prefix_len = 1;
        while (prefix_len < w.letters.size() && w.letters[prefix_len] == 0) ++prefix_len;
        label = -static_cast<std::int64_t>(prefix_len);
    } else {
        prefix_len = 0;
        label = 0;
    }
    return label - static_cast<std::int64_t>(w.letters.size() - prefix_len);
}

// --------------------------------------------------------------------------
// Orbit canonicalisation under origin-fixing automorphisms.

namespace {

TreeWord zeros(std::size_t n) {
    TreeWord w;
    w.letters.assign(n, 0);
    return w;
}

std::size_t lcp(const TreeWord& a, const TreeWord& b) {
    std::size_t n = std::min(a.letters.size(), b.letters.size());
    std::size_t i = 0;
    while (i < n && a.letters[i] == b.letters[i]) ++i;
    return i;
}

// Image of b under an automorphism that maps a to the all-zeros word.  At the
// divergence node the relabelling is forced apart, so the image letter is 1;
// past it the relabellings are free and we pick zeros.
TreeWord pair_image(const TreeWord& a, const TreeWord& b) {
    std::size_t l = lcp(a, b);
    TreeWord img = zeros(b.letters.size());
    if (l < a.letters.size() && l < b.letters.size()) img.letters[l] = 1;
    return img;
}

} // namespace

VertexAddr canonical_vertex(const GraphFamily& g, const VertexAddr& a) {
    validate_address(g, a);
    return std::visit(
        [&](const auto& x) -> VertexAddr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                return VertexAddr(zeros(std::get<TreeWord>(a.v).depth()));
            } else if constexpr (std::is_same_v<T, Line>) {
                auto z = std::get<LineInt>(a.v).z;
                return VertexAddr(LineInt{z < 0 ? -z : z});
            } else if constexpr (std::is_same_v<T, Hammock>) {
                const auto& h = std::get<HammockAddr>(a.v);
                if (h.is_spine()) return a;
                return VertexAddr(HammockAddr{-1, zeros(h.word.depth())});
            } else if constexpr (std::is_same_v<T, Product>) {
                const auto& p = std::get<ProductAddr>(a.v);
                ProductAddr q;
                for (std::size_t i = 0; i < x.factors.size(); ++i)
                    q.factors.push_back(canonical_vertex(x.factors[i], p.factors[i]));
                return VertexAddr(std::move(q));
            } else {
                const auto& ga = std::get<GluedAddr>(a.v);
                GluedAddr q;
                q.part = ga.part;
                q.local.push_back(canonical_vertex(x.parts[ga.part], ga.local.front()));
                return VertexAddr(std::move(q));
            }
        },
        g.g);
}

std::pair<VertexAddr, VertexAddr> canonical_pair(const GraphFamily& g, const VertexAddr& a,
                                                 const VertexAddr& b) {
    validate_address(g, a);
    validate_address(g, b);
    return std::visit(
        [&](const auto& x) -> std::pair<VertexAddr, VertexAddr> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                const auto& wa = std::get<TreeWord>(a.v);
                const auto& wb = std::get<TreeWord>(b.v);
                return {VertexAddr(zeros(wa.depth())), VertexAddr(pair_image(wa, wb))};
            } else if constexpr (std::is_same_v<T, Line>) {
                auto za = std::get<LineInt>(a.v).z;
                auto zb = std::get<LineInt>(b.v).z;
                if (za < 0 || (za == 0 && zb < 0)) return {VertexAddr(LineInt{-za}), VertexAddr(LineInt{-zb})};
                return {a, b};
            } else if constexpr (std::is_same_v<T, Hammock>) {
                const auto& ha = std::get<HammockAddr>(a.v);
                const auto& hb = std::get<HammockAddr>(b.v);
                if (ha.is_spine() && hb.is_spine()) return {a, b};
                if (ha.is_spine())
                    return {a, VertexAddr(HammockAddr{-1, zeros(hb.word.depth())})};
                if (hb.is_spine())
                    return {VertexAddr(HammockAddr{-1, zeros(ha.word.depth())}), b};
                return {VertexAddr(HammockAddr{-1, zeros(ha.word.depth())}),
                        VertexAddr(HammockAddr{-1, pair_image(ha.word, hb.word)})};
            } else if constexpr (std::is_same_v<T, Product>) {
                const auto& pa = std::get<ProductAddr>(a.v);
                const auto& pb = std::get<ProductAddr>(b.v);
                ProductAddr qa, qb;
                for (std::size_t i = 0; i < x.factors.size(); ++i) {
                    auto [ca, cb] = canonical_pair(x.factors[i], pa.factors[i], pb.factors[i]);
                    qa.factors.push_back(std::move(ca));
                    qb.factors.push_back(std::move(cb));
                }
                return {VertexAddr(std::move(qa)), VertexAddr(std::move(qb))};
            } else {
                const auto& ga = std::get<GluedAddr>(a.v);
                const auto& gb = std::get<GluedAddr>(b.v);
                if (ga.part == gb.part) {
                    auto [ca, cb] =
                        canonical_pair(x.parts[ga.part], ga.local.front(), gb.local.front());
                    GluedAddr qa{ga.part, {std::move(ca)}};
                    GluedAddr qb{gb.part, {std::move(cb)}};
                    return {VertexAddr(std::move(qa)), VertexAddr(std::move(qb))};
                }
                GluedAddr qa{ga.part, {canonical_vertex(x.parts[ga.part], ga.local.front())}};
                GluedAddr qb{gb.part, {canonical_vertex(x.parts[gb.part], gb.local.front())}};
                return {VertexAddr(std::move(qa)), VertexAddr(std::move(qb))};
            }
        },
        g.g);
}

std::string graph_to_string(const GraphFamily& g) {
    std::ostringstream os;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HomTree>) {
                os << "t(" << x.degree << ")";
            } else if constexpr (std::is_same_v<T, Line>) {
                os << "z";
            } else if constexpr (std::is_same_v<T, Hammock>) {
                os << "hammock";
            } else if constexpr (std::is_same_v<T, Product>) {
                os << "product(";
                for (std::size_t i = 0; i < x.factors.size(); ++i) {
                    if (i) os << ",";
                    os << graph_to_string(x.factors[i]);
                }
                os << ")";
            } else {
                os << "glue(";
                for (std::size_t i = 0; i < x.parts.size(); ++i) {
                    if (i) os << ",";
                    os << graph_to_string(x.parts[i]);
                }
                os << ")";
            }
        },
        g.g);
    return os.str();
}

} // namespace brwlab
