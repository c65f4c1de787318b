// brwlab: reproducible experiments on branching random walks over infinite
// graphs.  `brwlab presets` lists the canned experiments; any experiment can
// also be described by a config file (see README for the grammar).

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "brwlab/experiment.hpp"

namespace {

int map_exception_exit(const std::exception& e) {
    if (dynamic_cast<const brwlab::InternalConsistencyError*>(&e)) return 4;
    if (dynamic_cast<const brwlab::ResourceError*>(&e)) return 3;
    return 2;  // config / address / domain / parse errors
}

std::string default_out_dir() {
    if (const char* env = std::getenv("BRWLAB_OUT")) return env;
    return "out";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"branching random walk laboratory"};
    app.require_subcommand(1);

    std::string preset_name, config_path, out_dir = default_out_dir(), mode;
    std::uint64_t seed = 0;
    std::uint64_t reps = 0;
    bool have_seed = false, have_reps = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--preset", preset_name, "preset name (see `brwlab presets`)");
        cmd->add_option("--config", config_path, "config file");
        cmd->add_option("--out", out_dir, "output directory (default $BRWLAB_OUT or ./out)");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            have_seed = true;
        });
        cmd->add_option("--reps", reps, "replication override")->each([&](const std::string&) {
            have_reps = true;
        });
        cmd->add_option("--mode", mode, "arithmetic mode: float | rational")
            ->check(CLI::IsMember({"float", "rational"}));
    };

    std::vector<std::pair<CLI::App*, std::string>> kind_cmds;
    for (const char* name :
         {"return-series", "spectral-fit", "criticality-sum", "two-walk-sum", "simulate",
          "many-to-one", "purple", "ends", "fiber", "embedded-gw"}) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run a ") + name + " experiment");
        add_common(cmd);
        kind_cmds.emplace_back(cmd, name);
    }
    CLI::App* run_cmd = app.add_subcommand("run", "run a preset or config as-is");
    add_common(run_cmd);
    CLI::App* presets_cmd = app.add_subcommand("presets", "list available presets");
    bool show_config = false;
    presets_cmd->add_flag("--show", show_config, "also print each preset's config text");
    CLI::App* rerun_cmd = app.add_subcommand("rerun", "re-execute a run from its manifest");
    std::string manifest_path;
    rerun_cmd->add_option("manifest", manifest_path, "path to manifest.json")->required();
    rerun_cmd->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets_cmd->parsed()) {
            for (const auto& p : brwlab::list_presets()) {
                std::cout << p.name << "  -  " << p.description << "\n";
                if (show_config) std::cout << p.config_text << "\n";
            }
            return 0;
        }
        if (rerun_cmd->parsed()) {
            auto out = brwlab::rerun_from_manifest(manifest_path, out_dir);
            std::cout << out.summary << "\n";
            for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
            return out.exit_code;
        }

        brwlab::ExperimentConfig cfg;
        bool have_cfg = false;
        if (!preset_name.empty()) {
            cfg = brwlab::parse_config(brwlab::find_preset(preset_name).config_text);
            have_cfg = true;
        }
        if (!config_path.empty()) {
            cfg = brwlab::parse_config_file(config_path);
            have_cfg = true;
        }
        if (!have_cfg) throw brwlab::ConfigError("provide --preset or --config");

        for (const auto& [cmd, name] : kind_cmds) {
            if (cmd->parsed() && brwlab::kind_name(cfg.kind) != name)
                throw brwlab::ConfigError("config is a " + std::string(brwlab::kind_name(cfg.kind)) +
                                          " experiment, but the subcommand was " + name);
        }
        if (have_seed) cfg.seed = seed;
        if (have_reps) cfg.reps = reps;
        if (!mode.empty())
            cfg.mode = (mode == "rational") ? brwlab::ArithmeticMode::Rational
                                            : brwlab::ArithmeticMode::Float;

        auto out = brwlab::run_experiment(cfg, out_dir);
        std::cout << out.summary << "\n";
        for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
        return out.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return map_exception_exit(e);
    }
}
