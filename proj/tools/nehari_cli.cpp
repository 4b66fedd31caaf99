// Command line front end: resolves a run configuration, dispatches one of the
// five commands, and maps failures onto stable exit codes so scripts can rely
// on them (2 config/usage, 3 parameter out of admissible range, 4 iteration
// did not converge).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <nehari/config.hpp>
#include <nehari/errors.hpp>
#include <nehari/runner.hpp>
#include <nehari/version.hpp>

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string fiber_direction;
};

void add_common(CLI::App* sub, CliOptions& opt) {
    sub->add_option("--config", opt.config_path, "run configuration file (key = value lines)");
    sub->add_option("--out", opt.out_dir, "output directory (default: output.dir from config)");
    sub->add_option("--seed", opt.seed, "override solver.seed");
    sub->add_option("--threads", opt.threads, "worker threads (never changes results)")
        ->check(CLI::Range(1, 256));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("nehari ") + nehari::version +
                 " - two-branch constrained minimisation for a singular nonlocal variational "
                 "problem on (-1,1)"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* thresholds =
        app.add_subcommand("thresholds", "threshold constants, gap radii, coercivity minorant");
    CLI::App* fiber = app.add_subcommand("fiber", "fiber map along one direction");
    CLI::App* solve = app.add_subcommand("solve", "two positive solutions and the norm gap");
    CLI::App* sweep =
        app.add_subcommand("sweep-blowup", "minus-branch norms as r approaches p-1");
    CLI::App* sobolev =
        app.add_subcommand("sobolev", "critical embedding constant of the discrete seminorm");
    for (CLI::App* sub : {thresholds, fiber, solve, sweep, sobolev}) add_common(sub, opt);
    fiber->add_option("--direction", opt.fiber_direction,
                      "direction spec, e.g. 'gauss 0 0.25' (default: fiber.direction)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        nehari::RunConfig cfg = opt.config_path.empty()
                                    ? nehari::RunConfig{}
                                    : nehari::load_run_config(opt.config_path);
        if (opt.seed) cfg.solve.seed = *opt.seed;
        if (!opt.fiber_direction.empty()) cfg.fiber_direction = opt.fiber_direction;
        const std::string out = opt.out_dir.empty() ? cfg.output_dir : opt.out_dir;

        if (thresholds->parsed()) return nehari::cmd_thresholds(cfg, out, opt.threads);
        if (fiber->parsed()) return nehari::cmd_fiber(cfg, out, opt.threads);
        if (solve->parsed()) return nehari::cmd_solve(cfg, out, opt.threads);
        if (sweep->parsed()) return nehari::cmd_sweep_blowup(cfg, out, opt.threads);
        if (sobolev->parsed()) return nehari::cmd_sobolev(cfg, out, opt.threads);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const nehari::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nehari::out_of_range_error& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return 3;
    } catch (const nehari::convergence_error& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
