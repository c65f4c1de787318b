#ifndef BRWLAB_OFFSPRING_HPP
#define BRWLAB_OFFSPRING_HPP

#include <vector>

#include "brwlab/rational.hpp"

namespace brwlab {

// Offspring law mu with mu(0) = 0: support of positive counts, probabilities
// summing to 1, and the mean.
struct OffspringDist {
    std::vector<int> support;
    std::vector<double> probs;
    double mean = 1.0;

    bool is_degenerate() const { return support.size() == 1; }
};

OffspringDist make_offspring(const std::vector<std::pair<int, double>>& entries);

// The minimal two-point law on {floor(mean), floor(mean)+1} with the given
// mean; used with mean = scale / rho.  Requires rho in (0,1) so the mean
// exceeds 1 and mu(0) = 0 holds by construction.
OffspringDist critical_offspring(const Real50& rho, double scale = 1.0);

} // namespace brwlab

#endif
