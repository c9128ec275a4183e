#include "wgstab/harness.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>

namespace {

const char* describe(const std::string& name) {
    if (name == "factory") return "build the admissible pair and dump its axial profile";
    if (name == "direct") return "time-step the waveguide and record step diagnostics";
    if (name == "elliptic") return "manufactured convergence and fiber resolvent checks";
    if (name == "carleman") return "weight assumptions, conjugation refinement, ratio study";
    if (name == "lemma-inv") return "weighted initial-datum inequality on a linearized pair";
    if (name == "stability") return "amplitude sweep against the one-constant Hoelder bound";
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wgstab: numerical laboratory for waveguide potential recovery"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "configuration file (key = value sections)");
    app.add_option("--out", out_dir, "output directory override");
    const auto* seed_opt = app.add_option("--seed", seed, "run seed override");
    const auto* threads_opt = app.add_option("--threads", threads, "worker count override");

    for (const std::string& name : wgstab::subcommands())
        app.add_subcommand(name, describe(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    wgstab::RunConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = wgstab::load_config(config_path);
        } catch (const wgstab::ConfigError& e) {
            std::cerr << "wgstab: " << e.what() << "\n";
            return 2;
        }
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (threads_opt->count() > 0) cfg.threads = threads;

    const std::string name = app.get_subcommands().front()->get_name();
    const wgstab::RunResult result = wgstab::run_subcommand(name, cfg);
    if (result.status != 0)
        std::cerr << "wgstab " << name << ": " << result.failure << "\n";
    return result.status;
}
