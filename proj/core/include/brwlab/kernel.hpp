#ifndef BRWLAB_KERNEL_HPP
#define BRWLAB_KERNEL_HPP

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "brwlab/graph.hpp"
#include "brwlab/rational.hpp"

namespace brwlab {

// Transition-kernel specifications.  All probabilities are exact rationals;
// double-precision rows are derived views.

struct SimpleSpec {
    bool operator==(const SimpleSpec&) const = default;
};

struct KernelSpec;

struct LazySpec {
    std::vector<KernelSpec> base;  // exactly one element
    Rational stay;                 // in (0,1)
    bool operator==(const LazySpec&) const;
};

struct BiasedLineSpec {
    Rational p;  // step right (z+1) with probability p, left with 1-p
    bool operator==(const BiasedLineSpec&) const = default;
};

// Walk on T_3 relative to the fixed spine embedding: from a vertex of height
// h, jump to the unique height-(h+1) neighbour (the gradient direction,
// toward the spine's +infinity end) with probability p and to each of the two
// height-(h-1) neighbours with probability (1-p)/2.  The height process is
// then a biased line walk that moves +1 with probability p.
struct HeightBiasedSpec {
    Rational p;
    bool operator==(const HeightBiasedSpec&) const = default;
};

struct ProductKernelSpec {
    std::vector<std::pair<KernelSpec, Rational>> factors;  // (factor kernel, weight)
    bool operator==(const ProductKernelSpec&) const;
};

struct KernelSpec {
    std::variant<SimpleSpec, LazySpec, BiasedLineSpec, HeightBiasedSpec, ProductKernelSpec> k;

    KernelSpec() : k(SimpleSpec{}) {}
    KernelSpec(SimpleSpec s) : k(s) {}
    KernelSpec(LazySpec l) : k(std::move(l)) {}
    KernelSpec(BiasedLineSpec b) : k(std::move(b)) {}
    KernelSpec(HeightBiasedSpec h) : k(std::move(h)) {}
    KernelSpec(ProductKernelSpec p) : k(std::move(p)) {}

    bool operator==(const KernelSpec&) const = default;
};

KernelSpec simple_kernel();
KernelSpec lazy_kernel(KernelSpec base, Rational stay);
KernelSpec biased_line_kernel(Rational p);
KernelSpec height_biased_kernel(Rational p);
KernelSpec product_kernel(std::vector<std::pair<KernelSpec, Rational>> factors);

struct TransitionRow {
    VertexAddr source;
    std::vector<std::pair<VertexAddr, Rational>> probs;
};

// A kernel bound to its graph.  Immutable after construction; all methods
// are const and safe to share across threads.
class Kernel {
public:
    Kernel(KernelSpec spec, GraphFamily graph);

    const GraphFamily& graph() const { return graph_; }
    const KernelSpec& spec() const { return spec_; }

    // Deterministic exact row: the source first when it carries lazy mass,
    // then the neighbours in the graph's canonical order.  Probabilities are
    // strictly positive and sum to exactly 1.
    TransitionRow step_distribution(const VertexAddr& v) const;
    std::vector<std::pair<VertexAddr, double>> step_distribution_double(const VertexAddr& v) const;

    // Multinomially dispatches `n` particles over the step distribution
    // without materialising the row, so hammock spine vertices of any index
    // are steppable.  Appends (target, count) pairs with count >= 1.
    void sample_step_counts(const VertexAddr& v, std::uint64_t n, std::mt19937_64& eng,
                            std::vector<std::pair<VertexAddr, std::uint64_t>>& out) const;

    Rational stay_mass(const VertexAddr& v) const;

    // 2 for bipartite non-lazy walks, else 1.
    int period() const;

    // log of a reversing measure pi with pi(origin) = 1; every kernel here is
    // reversible.
    double log_reversing_measure(const VertexAddr& v) const;

    // True for Simple and Lazy(Simple...) kernels.
    bool is_simple_based() const;

private:
    KernelSpec spec_;
    GraphFamily graph_;
    std::vector<std::shared_ptr<const Kernel>> children_;  // lazy base / product factors
};

Kernel build_kernel(KernelSpec spec, GraphFamily graph);

// Degree-weighted product normalisation: the isotropic simple walk on a
// product of regular factors equals the product kernel with weights
// deg_k / sum(deg).  Returns the equivalent product form when it exists.
std::optional<ProductKernelSpec> as_product_form(const KernelSpec& spec, const GraphFamily& g);

struct ReversibilityReport {
    double max_ratio = 1.0;      // max over tested pairs of P_i(X_n=j)/P_j(X_n=i)
    std::size_t pairs_checked = 0;
    int horizon = 0;
    std::int64_t radius = 0;
};

// Verifies deg(i) P_i(X_m = j) == deg(j) P_j(X_m = i) exactly (rational
// arithmetic) for all i, j in the radius-R ball and all m <= n, using orbit
// representatives to keep the DP count small.  Throws
// InternalConsistencyError on any violation.
ReversibilityReport reversibility_check(const Kernel& kernel, int horizon, std::int64_t radius);

std::string kernel_to_string(const KernelSpec& spec);

} // namespace brwlab

#endif
