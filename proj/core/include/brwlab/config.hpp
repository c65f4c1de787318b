#ifndef BRWLAB_CONFIG_HPP
#define BRWLAB_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "brwlab/kernel.hpp"
#include "brwlab/series.hpp"

namespace brwlab {

enum class ExperimentKind {
    ReturnSeries,
    SpectralFit,
    CriticalitySum,
    TwoWalkSum,
    Simulate,
    ManyToOne,
    Purple,
    Ends,
    Fiber,
    EmbeddedGw,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& name);

// Offspring-law request: either `critical` (mean scale/rho, rho resolved at
// run time) or an explicit finite law.
struct MuSpec {
    bool critical = true;
    double scale = 1.0;
    std::vector<std::pair<int, double>> entries;  // explicit law when !critical
};

// One experiment, fully described by a line-oriented `key = expression`
// config.  Unset keys take the defaults below; the resolved form is echoed
// into the run manifest so a run can be reproduced from its manifest alone.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ReturnSeries;
    GraphFamily graph = line();
    KernelSpec kernel = simple_kernel();
    MuSpec mu;
    std::uint64_t seed = 1;
    ArithmeticMode mode = ArithmeticMode::Float;
    int horizon = 4000;        // series / sum horizon n
    int generations = 60;      // BRW budget
    std::uint64_t reps = 50;   // replications / seeds
    std::vector<std::int64_t> radii = {6};
    std::vector<int> horizons;  // purple comparison horizons
    std::optional<VertexAddr> source_i, source_j, target, fiber;
    int lag = 0;   // embedded process lag; 0 = derive minimal supercritical lag
    int lags = 1;  // lag multiples to follow
    std::optional<double> rho_override;
    std::uint64_t population_cap = 20'000'000;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical echo: parse(config_to_text(c)) reproduces c.
std::string config_to_text(const ExperimentConfig& c);

// Expression parsers, shared with the CLI.
GraphFamily parse_graph_expr(const std::string& text);
KernelSpec parse_kernel_expr(const std::string& text);
MuSpec parse_mu_expr(const std::string& text);

} // namespace brwlab

#endif
