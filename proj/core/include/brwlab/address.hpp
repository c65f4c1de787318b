#ifndef BRWLAB_ADDRESS_HPP
#define BRWLAB_ADDRESS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace brwlab {

// Canonical addresses for vertices of the lazily generated graph families.
//
// Tree words: in the homogeneous tree T_d the root is the empty word and has
// children labelled 0..d-1; every other vertex has children labelled 0..d-2
// and its parent is obtained by dropping the last letter.  Every vertex has
// exactly one spelling.  Hammock tree words use the four-letter alphabet
// 0..3 at every vertex, including the root.

struct TreeWord {
    std::vector<std::uint8_t> letters;

    bool is_root() const { return letters.empty(); }
    std::size_t depth() const { return letters.size(); }
    auto operator<=>(const TreeWord&) const = default;
};

struct LineInt {
    std::int64_t z = 0;
    auto operator<=>(const LineInt&) const = default;
};

// Either spine vertex k (k >= 0) or a vertex of the 4-ary tree.
struct HammockAddr {
    std::int64_t spine = -1;  // >= 0: spine index; -1: tree vertex given by `word`
    TreeWord word;

    bool is_spine() const { return spine >= 0; }
    auto operator<=>(const HammockAddr&) const = default;
};

struct VertexAddr;

struct ProductAddr {
    std::vector<VertexAddr> factors;
    bool operator==(const ProductAddr&) const;
    bool operator<(const ProductAddr&) const;
};

// Component index plus component-local address; all basepoints are
// identified, and the shared origin is always spelled as part 0's basepoint.
struct GluedAddr {
    std::size_t part = 0;
    std::vector<VertexAddr> local;  // exactly one element (indirection for recursion)
    bool operator==(const GluedAddr&) const;
    bool operator<(const GluedAddr&) const;
};

struct VertexAddr {
    std::variant<TreeWord, LineInt, HammockAddr, ProductAddr, GluedAddr> v;

    VertexAddr() : v(TreeWord{}) {}
    VertexAddr(TreeWord w) : v(std::move(w)) {}
    VertexAddr(LineInt z) : v(z) {}
    VertexAddr(HammockAddr h) : v(std::move(h)) {}
    VertexAddr(ProductAddr p) : v(std::move(p)) {}
    VertexAddr(GluedAddr g) : v(std::move(g)) {}

    // total order: type tag first, then contents; fixes canonical iteration
    bool operator==(const VertexAddr& o) const;
    bool operator<(const VertexAddr& o) const;
    bool operator!=(const VertexAddr& o) const { return !(*this == o); }
    bool operator>(const VertexAddr& o) const { return o < *this; }
    bool operator<=(const VertexAddr& o) const { return !(o < *this); }
    bool operator>=(const VertexAddr& o) const { return !(*this < o); }
};

// Compact string form: "w:012" (tree word, "w:" alone is the root), "z:-3",
// "h:s2" / "h:t013" / "h:t" (hammock spine / tree), products comma-joined in
// parentheses "(w:01,z:-2)", glued parts "c1:w:0".
std::string to_string(const VertexAddr& a);
VertexAddr addr_from_string(const std::string& text);

std::size_t hash_value(const VertexAddr& a);

struct AddrHash {
    std::size_t operator()(const VertexAddr& a) const { return hash_value(a); }
};

inline TreeWord make_word(std::initializer_list<int> letters) {
    TreeWord w;
    for (int l : letters) w.letters.push_back(static_cast<std::uint8_t>(l));
    return w;
}

} // namespace brwlab

#endif
