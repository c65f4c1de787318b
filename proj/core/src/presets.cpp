#include "brwlab/experiment.hpp"

namespace brwlab {

// Presets are plain config texts so they double as documentation of the
// grammar.  Seeds are fixed: runs are reproducible byte for byte.

const std::vector<Preset>& list_presets() {
    static const std::vector<Preset> presets = {
        {"t3xz-critical-ends",
         "critical walk on t(3) x z: far components proliferate (pair with t3xz-biased-ends)",
         "experiment = ends\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "mu = critical\n"
         "generations = 60\n"
         "radii = 6\n"
         "reps = 50\n"
         "seed = 1001\n"},
        {"t3xz-biased-ends",
         "biased line factor p = 0.7: the far trace stays in one piece",
         "experiment = ends\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: biasedline(0.7)@2)\n"
         "mu = critical\n"
         "generations = 60\n"
         "radii = 6\n"
         "reps = 50\n"
         "seed = 1001\n"},
        {"t3xt3-purple",
         "two critical processes on t(3) x t(3) from distance 10: purple set stabilises",
         "experiment = purple\n"
         "graph = product(t(3), t(3))\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "mu = critical\n"
         "generations = 30\n"
         "horizons = 20, 30\n"
         "source_i = (w:,w:)\n"
         "source_j = (w:00000,w:00000)\n"
         "reps = 50\n"
         "seed = 1002\n"},
        {"t3xz-biased-purple",
         "biased t(3) x z: the purple set keeps growing",
         "experiment = purple\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: biasedline(0.7)@2)\n"
         "mu = critical\n"
         "generations = 60\n"
         "horizons = 30, 60\n"
         "reps = 50\n"
         "seed = 1003\n"},
        {"t3xt3-biased-ends",
         "height-biased factor p = 0.7 on t(3) x t(3) (numerical rho)",
         "experiment = ends\n"
         "graph = product(t(3), t(3))\n"
         "kernel = product(1/2: heightbiased(0.7)@1, 1/2: simple@2)\n"
         "mu = critical\n"
         "generations = 60\n"
         "radii = 6\n"
         "reps = 50\n"
         "seed = 1004\n"},
        {"hammock-one-end",
         "isotropic walk on the hammock graph: one far component",
         "experiment = ends\n"
         "graph = hammock\n"
         "kernel = simple\n"
         "mu = critical\n"
         "generations = 60\n"
         "radii = 6\n"
         "reps = 50\n"
         "seed = 1005\n"},
        {"glue-mixed-ends",
         "two hammocks and a t(3) x t(3) glued at one vertex: mixed end counts",
         "experiment = ends\n"
         "graph = glue(hammock, hammock, product(t(3), t(3)))\n"
         "kernel = simple\n"
         "mu = critical\n"
         "generations = 60\n"
         "radii = 6\n"
         "reps = 50\n"
         "seed = 1006\n"},
        {"cs1-exponent",
         "simple walk on t(3): returns decay like rho^n / n^(3/2)",
         "experiment = spectral-fit\n"
         "graph = t(3)\n"
         "kernel = simple\n"
         "n = 4000\n"
         "seed = 1007\n"},
        {"cs2-additivity",
         "product walk: spectral radii mix linearly, exponents add (3/2 + 1/2)",
         "experiment = spectral-fit\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: biasedline(0.7)@2)\n"
         "n = 4000\n"
         "seed = 1008\n"},
        {"theorem1-sum",
         "sum (n+1) rho^-n p_n on t(3) x t(3): converges",
         "experiment = criticality-sum\n"
         "graph = product(t(3), t(3))\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "n = 4000\n"
         "seed = 1009\n"},
        {"theorem1-sum-t3xz",
         "sum (n+1) rho^-n p_n on t(3) x z: diverges logarithmically",
         "experiment = criticality-sum\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "n = 4000\n"
         "seed = 1010\n"},
        {"theorem2-sum",
         "two-walk sum at i = j on t(3) x t(3); terms equal (s+1) m^s p_s",
         "experiment = two-walk-sum\n"
         "graph = product(t(3), t(3))\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "n = 200\n"
         "seed = 1011\n"},
        {"many-to-one",
         "expected particle counts vs m^n P(X_n = j) on critical t(3) x z",
         "experiment = many-to-one\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "mu = critical\n"
         "generations = 8\n"
         "reps = 100000\n"
         "seed = 1012\n"},
        {"t3xz-embedded-gw",
         "embedded process along a line fiber, p = 0.7, minimal supercritical lag",
         "experiment = embedded-gw\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: biasedline(0.7)@2)\n"
         "mu = critical\n"
         "lag = auto\n"
         "lags = 1\n"
         "reps = 10000\n"
         "seed = 1013\n"},
        {"t3xz-fiber",
         "how often the critical process returns to one line fiber",
         "experiment = fiber\n"
         "graph = product(t(3), z)\n"
         "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
         "mu = critical\n"
         "generations = 100\n"
         "reps = 50\n"
         "seed = 1014\n"},
        {"open-problem-midrange-bias",
         "height bias p = 0.42 on t(3) x t(3): end count unknown; no expected outcome",
         "experiment = ends\n"
         "graph = product(t(3), t(3))\n"
         "kernel = product(1/2: heightbiased(0.42)@1, 1/2: simple@2)\n"
         "mu = critical\n"
         "generations = 60\n"
         "radii = 6\n"
         "reps = 50\n"
         "seed = 1015\n"},
    };
    return presets;
}

} // namespace brwlab
