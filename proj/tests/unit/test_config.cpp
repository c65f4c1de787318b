#include <doctest.h>

#include "brwlab/config.hpp"
#include "brwlab/experiment.hpp"

using namespace brwlab;

TEST_CASE("graph expressions") {
    CHECK(parse_graph_expr("t(3)") == hom_tree(3));
    CHECK(parse_graph_expr("z") == line());
    CHECK(parse_graph_expr("hammock") == hammock());
    CHECK(parse_graph_expr("product(t(3), z)") == product({hom_tree(3), line()}));
    auto gl = parse_graph_expr("glue(hammock, hammock, product(t(3), t(3)))");
    CHECK(std::holds_alternative<Glued>(gl.g));
    CHECK_THROWS_AS(parse_graph_expr("t(2)"), ConfigError);
    CHECK_THROWS_AS(parse_graph_expr("torus"), ConfigError);
    CHECK_THROWS_AS(parse_graph_expr("product(t(3)"), ConfigError);
}

TEST_CASE("kernel expressions") {
    CHECK(parse_kernel_expr("simple") == simple_kernel());
    CHECK(parse_kernel_expr("lazy(simple, 0.5)") == lazy_kernel(simple_kernel(), Rational(1, 2)));
    CHECK(parse_kernel_expr("biasedline(0.7)") == biased_line_kernel(Rational(7, 10)));
    CHECK(parse_kernel_expr("heightbiased(7/10)") == height_biased_kernel(Rational(7, 10)));
    auto pk = parse_kernel_expr("product(0.5: simple@1, 0.5: biasedline(0.7)@2)");
    CHECK(pk == product_kernel({{simple_kernel(), Rational(1, 2)},
                                {biased_line_kernel(Rational(7, 10)), Rational(1, 2)}}));
    // factor tags, when present, must be in order
    CHECK_THROWS_AS(parse_kernel_expr("product(0.5: simple@2, 0.5: simple@1)"), ConfigError);
    CHECK_THROWS_AS(parse_kernel_expr("sticky"), ConfigError);
}

TEST_CASE("offspring expressions") {
    auto crit = parse_mu_expr("critical");
    CHECK(crit.critical);
    CHECK(crit.scale == 1.0);
    auto scaled = parse_mu_expr("critical(1.2)");
    CHECK(scaled.scale == doctest::Approx(1.2));
    auto expl = parse_mu_expr("{1: 0.75, 3: 0.25}");
    CHECK(!expl.critical);
    REQUIRE(expl.entries.size() == 2);
    CHECK(expl.entries[1].first == 3);
    auto degen = parse_mu_expr("2");
    CHECK(degen.entries == std::vector<std::pair<int, double>>{{2, 1.0}});
}

TEST_CASE("config files parse and echo back identically") {
    std::string text =
        "# an ends comparison\n"
        "experiment = ends\n"
        "graph = product(t(3), z)\n"
        "kernel = product(1/2: simple@1, 1/2: biasedline(0.7)@2)\n"
        "mu = critical\n"
        "generations = 60\n"
        "radii = 4, 6\n"
        "reps = 50\n"
        "seed = 4242\n";
    auto cfg = parse_config(text);
    CHECK(cfg.kind == ExperimentKind::Ends);
    CHECK(cfg.seed == 4242);
    CHECK(cfg.radii == std::vector<std::int64_t>{4, 6});
    CHECK(cfg.generations == 60);

    auto echoed = parse_config(config_to_text(cfg));
    CHECK(echoed.kind == cfg.kind);
    CHECK(echoed.graph == cfg.graph);
    CHECK(echoed.kernel == cfg.kernel);
    CHECK(echoed.seed == cfg.seed);
    CHECK(echoed.radii == cfg.radii);
    CHECK(config_to_text(echoed) == config_to_text(cfg));
}

TEST_CASE("configs with addresses round-trip") {
    std::string text =
        "experiment = purple\n"
        "graph = product(t(3), t(3))\n"
        "kernel = product(1/2: simple@1, 1/2: simple@2)\n"
        "source_i = (w:,w:)\n"
        "source_j = (w:00000,w:00000)\n"
        "horizons = 20, 30\n";
    auto cfg = parse_config(text);
    REQUIRE(cfg.source_j.has_value());
    CHECK(to_string(*cfg.source_j) == "(w:00000,w:00000)");
    auto echoed = parse_config(config_to_text(cfg));
    CHECK(echoed.source_j == cfg.source_j);
    CHECK(echoed.horizons == cfg.horizons);
}

TEST_CASE("bad configs are rejected with config errors") {
    CHECK_THROWS_AS(parse_config("graph = z\n"), ConfigError);             // no experiment
    CHECK_THROWS_AS(parse_config("experiment = dance\n"), ConfigError);    // unknown kind
    CHECK_THROWS_AS(parse_config("experiment = ends\nbudget == 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = ends\nflavour = vanilla\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = ends\nmode = exact\n"), ConfigError);
}

TEST_CASE("every preset parses and names its kind") {
    auto& presets = list_presets();
    CHECK(presets.size() >= 11);
    bool have_hammock = false, have_cs2 = false;
    for (const auto& p : presets) {
        auto cfg = parse_config(p.config_text);
        CHECK(!p.description.empty());
        if (p.name == "hammock-one-end") have_hammock = true;
        if (p.name == "cs2-additivity") have_cs2 = true;
    }
    CHECK(have_hammock);
    CHECK(have_cs2);
    CHECK_THROWS_AS(find_preset("no-such-preset"), ConfigError);
}
