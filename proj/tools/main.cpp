// Command-line front end: scenario-driven closed-loop runs, adaptive vs
// non-adaptive comparisons, and disturbance sweeps.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "diwmrac/commands.hpp"

namespace {

struct SubArgs {
    CLI::App* app = nullptr;
    CLI::Option* seed_opt = nullptr;
};

SubArgs add_subcommand(CLI::App& app, diwmrac::RunManifest& manifest, std::uint64_t& seed,
                       const char* name, const char* help) {
    SubArgs sub;
    sub.app = app.add_subcommand(name, help);
    sub.app->add_option("scenario", manifest.scenario_path, "scenario JSON file")
        ->required();
    sub.app->add_option("--out", manifest.out_dir, "output directory")->required();
    sub.app->add_option("--set", manifest.overrides,
                        "override a config value, dotted.path=value (repeatable)");
    sub.seed_opt = sub.app->add_option("--seed", seed, "derive fresh noise seeds from N");
    sub.app->add_flag("--plots", manifest.plots, "emit SVG plots");
    return sub;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop simulator for adaptive extrusion printing control"};
    app.require_subcommand(1);

    diwmrac::RunManifest manifest;
    std::uint64_t seed = 0;

    const SubArgs run = add_subcommand(app, manifest, seed, "run",
                                       "integrate one scenario and write its artifacts");
    const SubArgs compare =
        add_subcommand(app, manifest, seed, "compare",
                       "run the adaptive/non-adaptive pair on a shared scenario");
    const SubArgs sweep = add_subcommand(app, manifest, seed, "sweep",
                                         "run every case of a disturbance sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // command-line problems are configuration errors
    }

    for (const SubArgs& sub : {run, compare, sweep}) {
        if (!app.got_subcommand(sub.app)) continue;
        if (sub.seed_opt->count() > 0) manifest.seed = seed;
        if (sub.app == run.app) return diwmrac::cmd_run(manifest, std::cout, std::cerr);
        if (sub.app == compare.app)
            return diwmrac::cmd_compare(manifest, std::cout, std::cerr);
        return diwmrac::cmd_sweep(manifest, std::cout, std::cerr);
    }
    return 2;
}
