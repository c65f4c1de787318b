#ifndef BRWLAB_GRAPH_HPP
#define BRWLAB_GRAPH_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "brwlab/address.hpp"
#include "brwlab/errors.hpp"

namespace brwlab {

// Immutable descriptors of the graph families.  All operations are pure;
// adjacency is produced on demand so the infinite graphs are explored only
// where a process goes.

struct HomTree {
    int degree = 3;  // every vertex has `degree` neighbours; requires degree >= 3
    auto operator<=>(const HomTree&) const = default;
};

struct Line {
    auto operator<=>(const Line&) const = default;
};

// Rooted 4-ary tree plus a half-line spine; spine vertex n is joined to every
// tree vertex of generation n and of generation n+1.  There is no spine -1.
struct Hammock {
    auto operator<=>(const Hammock&) const = default;
};

struct GraphFamily;

struct Product {
    std::vector<GraphFamily> factors;
    bool operator==(const Product&) const;
};

struct Glued {
    std::vector<GraphFamily> parts;
    std::vector<VertexAddr> basepoints;  // one per part, identified to a single origin
    bool operator==(const Glued&) const;
};

struct GraphFamily {
    std::variant<HomTree, Line, Hammock, Product, Glued> g;

    GraphFamily() : g(Line{}) {}
    GraphFamily(HomTree t) : g(t) {}
    GraphFamily(Line l) : g(l) {}
    GraphFamily(Hammock h) : g(h) {}
    GraphFamily(Product p) : g(std::move(p)) {}
    GraphFamily(Glued gl) : g(std::move(gl)) {}

    bool operator==(const GraphFamily&) const = default;
};

GraphFamily hom_tree(int degree);
GraphFamily line();
GraphFamily hammock();
GraphFamily product(std::vector<GraphFamily> factors);

// All basepoints become one origin vertex.  One basepoint per part.
GraphFamily glue(std::vector<GraphFamily> parts, std::vector<VertexAddr> basepoints);

VertexAddr origin(const GraphFamily& g);

// Throws AddressError on a malformed address (wrong alphabet, wrong arity).
void validate_address(const GraphFamily& g, const VertexAddr& a);

// Adjacent vertices, each exactly once, in the canonical order:
//   HomTree   root: children 0..d-1; otherwise parent first, then children 0..d-2.
//   Line      z-1, z+1.
//   Hammock   tree word of generation g: parent (g>=1), children 0..3,
//             spine g-1 (g>=1), spine g.
//             spine k: spine k-1 (k>=1), spine k+1, generation-k words in
//             lexicographic order, generation-(k+1) words in lexicographic order.
//   Product   factor 0 moves first (factor order within), then factor 1, ...
//   Glued     at the origin, the parts' basepoint neighbourhoods concatenated
//             in part order; elsewhere the part-local order.
// This order fixes multinomial sampling and DP iteration order everywhere.
std::vector<VertexAddr> neighbors(const GraphFamily& g, const VertexAddr& a);

std::uint64_t degree_of(const GraphFamily& g, const VertexAddr& a);

// Graph distance from the origin (|word|, |z|, sum over factors; for the
// hammock, the generation for tree vertices and k+1 for spine vertex k).
std::int64_t ball_distance(const GraphFamily& g, const VertexAddr& a);

// Every vertex within distance <= radius of the origin, BFS order.
std::vector<VertexAddr> ball(const GraphFamily& g, std::int64_t radius);

// ---------------------------------------------------------------------------
// Spine embedding of the line into T_3, fixed once for reproducibility:
// phi(0) = root, phi(n) = 0^n for n >= 1, phi(-n) = "1" followed by n-1
// zeros.  The height of a word is the phi-label of the nearest spine vertex
// minus the distance to the spine.  Under this embedding every vertex has
// exactly one neighbour of height h+1 (its gradient direction, toward the
// +infinity end of the spine) and two neighbours of height h-1.

TreeWord spine_word(std::int64_t label);
std::optional<std::int64_t> spine_label(const TreeWord& w);
std::int64_t height(const TreeWord& w);

// ---------------------------------------------------------------------------
// Automorphism-orbit helpers.  canonical_vertex maps a vertex to the
// representative of its orbit under origin-fixing automorphisms;
// canonical_pair applies one automorphism sending `a` to its representative
// and returns the images of both a and b.  Used to cut symmetric DP work
// without losing exactness.

VertexAddr canonical_vertex(const GraphFamily& g, const VertexAddr& a);
std::pair<VertexAddr, VertexAddr> canonical_pair(const GraphFamily& g, const VertexAddr& a,
                                                 const VertexAddr& b);

std::string graph_to_string(const GraphFamily& g);

} // namespace brwlab

#endif
