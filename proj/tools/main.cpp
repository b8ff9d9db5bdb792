#include <string>

#include "CLI11.hpp"
#include "rim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Local unstable invariant manifolds for stochastic reaction-diffusion "
                 "equations: solves, shape studies, and Monte Carlo verification"};
    app.require_subcommand(1);

    rim::RunManifest manifest;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", manifest.config_path, "config file (INI sections)")
            ->required();
        sub->add_option("--out", manifest.output_dir, "output directory");
        sub->add_option("--seed", seed, "override [experiments] base_seed");
        sub->add_flag("--deterministic", manifest.deterministic, "force the sigma = 0 branch");
        sub->add_flag("--force", manifest.force, "overwrite a completed run");
    };

    CLI::App* solve = app.add_subcommand("solve", "single manifold point");
    CLI::App* shape = app.add_subcommand("shape-study", "shape-error sweep over radii");
    CLI::App* mc = app.add_subcommand("mc-probability", "tail probability and shape-bound study");
    CLI::App* inv = app.add_subcommand("invariance", "forward-flow invariance residuals");
    CLI::App* kdiag = app.add_subcommand("k-diagnostics", "pathwise constant diagnostics");
    CLI::App* validate = app.add_subcommand("validate", "check a config against all preconditions");
    for (CLI::App* sub : {solve, shape, mc, inv, kdiag, validate}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) manifest.subcommand = rim::Subcommand::solve;
    if (shape->parsed()) manifest.subcommand = rim::Subcommand::shape_study;
    if (mc->parsed()) manifest.subcommand = rim::Subcommand::mc_probability;
    if (inv->parsed()) manifest.subcommand = rim::Subcommand::invariance;
    if (kdiag->parsed()) manifest.subcommand = rim::Subcommand::k_diagnostics;
    if (validate->parsed()) manifest.subcommand = rim::Subcommand::validate;
    if (!app.get_subcommands().empty() &&
        app.get_subcommands().front()->count("--seed") > 0) {
        manifest.seed_override = seed;
    }

    return rim::run(manifest);
}
