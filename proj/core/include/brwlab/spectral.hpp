#ifndef BRWLAB_SPECTRAL_HPP
#define BRWLAB_SPECTRAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "brwlab/chains.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/series.hpp"

namespace brwlab {

// Fit of p_n ~ C rho^n / n^a over the window [N/2, N] of positive terms.
struct SpectralFit {
    double rho_hat = 0;
    double a_hat = 0;
    double log_c_hat = 0;
    double r2 = 0;  // of the exponent regression
    int window_lo = 0;
    int window_hi = 0;
    std::string method;
    bool rho_was_known = false;
};

// With known_rho, regresses log(p_n rho^-n) on log n.  Otherwise the decay
// rate is estimated first from consecutive positive-term ratios
// (log-ratio = log rho - a/n + O(1/n^2), so regressing on 1/n removes the
// polynomial bias), then the exponent is fitted the same way.
SpectralFit fit_spectral(const ReturnSeries& series, std::optional<double> known_rho = {});

// Closed-form spectral radii: 2 sqrt(d-1)/d for the simple walk on T_d, 1 on
// the line, 2 sqrt(p(1-p)) for the biased line, stay + (1-stay) rho for lazy
// walks, and the weighted sum over factors for product kernels.  Empty where
// no closed form is claimed (hammock, height-biased, glued).
std::optional<Real50> analytic_rho(const KernelSpec& spec, const GraphFamily& g);

struct DirichletResult {
    double value = 0;
    double delta = 0;
    bool converged = true;
    int iterations = 0;
    std::size_t states = 0;
    std::string operator_kind;  // "quotient-chain" or "vertex-ball"
};

// Largest eigenvalue of the kernel restricted to the radius-R ball with
// absorbing boundary.  Uses the quotient chain when one exists (the Perron
// eigenfunction is constant on symmetry orbits, so the eigenvalues agree);
// otherwise enumerates the vertex ball.
DirichletResult dirichlet_rho(const Kernel& kernel, std::int64_t radius, int max_iters = 200000,
                              double tol = 5e-14);

enum class Verdict { Converged, Diverging, Inconclusive };

const char* verdict_name(Verdict v);

struct ConditionReport {
    std::vector<double> terms;
    std::vector<double> partial_sums;
    Verdict verdict = Verdict::Inconclusive;
    double tail_estimate = 0;  // relative contribution of the last positive term
    double a_hat = 0;
    double r2 = 0;
    std::string note;
};

// Partial sums of sum_n (n+1) rho^-n p_n.  Converged requires the fitted
// exponent a > 2 with margin and a negligible relative tail; diverging
// requires a <= 2 (within the same margin) with a good log-log fit.
ConditionReport criticality_sum(const ReturnSeries& series, double rho, int N);

struct TwoWalkReport {
    std::vector<double> terms;  // T_s = m^s sum_{k+n=s} <f_k, g_n>
    std::vector<double> partial_sums;
    Verdict verdict = Verdict::Inconclusive;
    double tail_estimate = 0;
    double a_hat = 0;
    double r2 = 0;
    // i == j only: max over s of the relative gap to (s+1) m^s p_s
    std::optional<double> max_rel_diag_gap;
    std::string route;
};

struct TwoWalkOptions {
    std::size_t support_cap = 2'000'000;
    // diagonal reference series for the i == j identity check (optional)
    const ReturnSeries* diagonal = nullptr;
};

// Inner products of the exact time-k and time-n distributions of two
// independent walks started from i and j.  For 2-factor products of trees
// and lines the distributions are carried on two-centre symmetry classes;
// otherwise on raw sparse vectors subject to the support cap.
TwoWalkReport two_walk_sum(const Kernel& kernel, const VertexAddr& i, const VertexAddr& j,
                           double m, int N, const TwoWalkOptions& opts = {});

enum class Regime { Transient, Critical, Recurrent };

struct RegimeReport {
    Regime regime = Regime::Transient;
    bool critical = false;
    bool transient = false;  // critical walks are transient too
};

RegimeReport classify_regime(double m, double rho);

struct NumericalRho {
    double value = 0;
    std::string method;
};

// rho for kernels without closed form: series fit when a quotient chain
// exists, else a Dirichlet ladder extrapolated in 1/R^2.
NumericalRho numerical_rho(const Kernel& kernel);

} // namespace brwlab

#endif
