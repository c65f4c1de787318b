#include "brwlab/address.hpp"

#include <sstream>

#include "brwlab/errors.hpp"

namespace brwlab {

namespace {

template <class T>
int cmp3(const T& a, const T& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

int addr_cmp(const VertexAddr& a, const VertexAddr& b);

template <class Vec>
int vec_cmp(const Vec& a, const Vec& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = addr_cmp(a[i], b[i]);
        if (c != 0) return c;
    }
    return cmp3(a.size(), b.size());
}

int addr_cmp(const VertexAddr& a, const VertexAddr& b) {
    if (a.v.index() != b.v.index()) return a.v.index() < b.v.index() ? -1 : 1;
    switch (a.v.index()) {
        case 0: return cmp3(std::get<TreeWord>(a.v).letters, std::get<TreeWord>(b.v).letters);
        case 1: return cmp3(std::get<LineInt>(a.v).z, std::get<LineInt>(b.v).z);
        case 2: {
            const auto& x = std::get<HammockAddr>(a.v);
            const auto& y = std::get<HammockAddr>(b.v);
            if (int c = cmp3(x.spine, y.spine)) return c;
            return cmp3(x.word.letters, y.word.letters);
        }
        case 3:
            return vec_cmp(std::get<ProductAddr>(a.v).factors,
                           std::get<ProductAddr>(b.v).factors);
        default: {
            const auto& x = std::get<GluedAddr>(a.v);
            const auto& y = std::get<GluedAddr>(b.v);
            if (int c = cmp3(x.part, y.part)) return c;
            return vec_cmp(x.local, y.local);
        }
    }
}

} // namespace

bool ProductAddr::operator==(const ProductAddr& o) const { return vec_cmp(factors, o.factors) == 0; }
bool ProductAddr::operator<(const ProductAddr& o) const { return vec_cmp(factors, o.factors) < 0; }

bool GluedAddr::operator==(const GluedAddr& o) const {
    return part == o.part && vec_cmp(local, o.local) == 0;
}
bool GluedAddr::operator<(const GluedAddr& o) const {
    if (part != o.part) return part < o.part;
    return vec_cmp(local, o.local) < 0;
}

bool VertexAddr::operator==(const VertexAddr& o) const { return addr_cmp(*this, o) == 0; }
bool VertexAddr::operator<(const VertexAddr& o) const { return addr_cmp(*this, o) < 0; }

namespace {

void word_to_stream(const TreeWord& w, std::ostringstream& os) {
    for (auto l : w.letters) os << char('0' + l);
}

TreeWord word_from_digits(const std::string& s, std::size_t from, std::size_t to) {
    TreeWord w;
    for (std::size_t i = from; i < to; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') throw AddressError("bad tree word letter in '" + s + "'");
        w.letters.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return w;
}

// Splits "(a,b,c)" at top-level commas.
std::vector<std::string> split_tuple(const std::string& s) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

} // namespace

std::string to_string(const VertexAddr& a) {
    std::ostringstream os;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, TreeWord>) {
                os << "w:";
                word_to_stream(x, os);
            } else if constexpr (std::is_same_v<T, LineInt>) {
                os << "z:" << x.z;
            } else if constexpr (std::is_same_v<T, HammockAddr>) {
                if (x.is_spine()) {
                    os << "h:s" << x.spine;
                } else {
                    os << "h:t";
                    word_to_stream(x.word, os);
                }
            } else if constexpr (std::is_same_v<T, ProductAddr>) {
                os << '(';
                for (std::size_t i = 0; i < x.factors.size(); ++i) {
                    if (i) os << ',';
                    os << to_string(x.factors[i]);
                }
                os << ')';
            } else if constexpr (std::is_same_v<T, GluedAddr>) {
                os << 'c' << x.part << ':' << to_string(x.local.front());
            }
        },
        a.v);
    return os.str();
}

VertexAddr addr_from_string(const std::string& text) {
    if (text.empty()) throw AddressError("empty address");
    if (text.front() == '(') {
        if (text.back() != ')') throw AddressError("unterminated tuple in '" + text + "'");
        ProductAddr p;
        for (const auto& part : split_tuple(text)) p.factors.push_back(addr_from_string(part));
        return VertexAddr(std::move(p));
    }
    if (text.rfind("w:", 0) == 0) {
        return VertexAddr(word_from_digits(text, 2, text.size()));
    }
    if (text.rfind("z:", 0) == 0) {
        try {
            return VertexAddr(LineInt{std::stoll(text.substr(2))});
        } catch (const std::exception&) {
            throw AddressError("bad line coordinate in '" + text + "'");
        }
    }
    if (text.rfind("h:", 0) == 0) {
        if (text.size() < 3) throw AddressError("truncated hammock address '" + text + "'");
        if (text[2] == 's') {
            try {
                std::int64_t k = std::stoll(text.substr(3));
                if (k < 0) throw AddressError("negative spine index in '" + text + "'");
                return VertexAddr(HammockAddr{k, {}});
            } catch (const AddressError&) {
                throw;
            } catch (const std::exception&) {
                throw AddressError("bad spine index in '" + text + "'");
            }
        }
        if (text[2] == 't') return VertexAddr(HammockAddr{-1, word_from_digits(text, 3, text.size())});
        throw AddressError("bad hammock tag in '" + text + "'");
    }
    if (text.front() == 'c') {
        auto colon = text.find(':');
        if (colon == std::string::npos) throw AddressError("bad glued address '" + text + "'");
        std::size_t part = 0;
        try {
            part = std::stoul(text.substr(1, colon - 1));
        } catch (const std::exception&) {
            throw AddressError("bad part index in '" + text + "'");
        }
        GluedAddr g;
        g.part = part;
        g.local.push_back(addr_from_string(text.substr(colon + 1)));
        return VertexAddr(std::move(g));
    }
    throw AddressError("unrecognised address '" + text + "'");
}

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::size_t hash_word(const TreeWord& w, std::size_t salt) {
    std::size_t h = salt;
    for (auto l : w.letters) h = hash_mix(h, l + 1);
    return hash_mix(h, w.letters.size());
}

} // namespace

std::size_t hash_value(const VertexAddr& a) {
    return std::visit(
        [](const auto& x) -> std::size_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, TreeWord>) {
                return hash_word(x, 0x11);
            } else if constexpr (std::is_same_v<T, LineInt>) {
                return hash_mix(0x22, static_cast<std::size_t>(x.z * 2654435761ULL + 17));
            } else if constexpr (std::is_same_v<T, HammockAddr>) {
                if (x.is_spine()) return hash_mix(0x33, static_cast<std::size_t>(x.spine));
                return hash_word(x.word, 0x44);
            } else if constexpr (std::is_same_v<T, ProductAddr>) {
                std::size_t h = 0x55;
                for (const auto& f : x.factors) h = hash_mix(h, hash_value(f));
                return h;
            } else {
                std::size_t h = hash_mix(0x66, x.part);
                return hash_mix(h, hash_value(x.local.front()));
            }
        },
        a.v);
}

} // namespace brwlab
