// gaborframe: frame bounds, Theorem-style verification, lattice-shape scans
// and identity checks from the command line.

#include <iostream>

#include "CLI11.hpp"

#include "gaborframe/cli.hpp"

int main(int argc, char** argv) {
    gabor::cli::RunConfig c;
    CLI::App app{"Gabor frame bounds over phase-space lattices"};
    app.fallthrough();
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "key=value config file; command-line flags win");

    std::optional<double> volume, density;
    app.add_option("--window", c.window, "hermite:N[,M] | gaussian[:d] | sampled:PATH")->capture_default_str();
    app.add_option("--lattice", c.lattice, "square | hexagonal | matrix:PATH")->capture_default_str();
    app.add_option("--volume", volume, "lattice volume for presets (default 2^-d)");
    app.add_option("--grid-res", c.grid_res, "initial fundamental-domain grid resolution")->capture_default_str();
    app.add_option("--tail", c.tail, "target tail of truncated lattice sums")->capture_default_str();
    app.add_option("--section-radius", c.section_radius, "Gram section radius")->capture_default_str();
    app.add_option("--method", c.method, "janssen | gram | both")->capture_default_str();
    app.add_option("--out", c.out, "output path (default stdout)");
    app.add_option("--format", c.format, "json | csv");
    app.add_option("--density", density, "scan density (default 1/volume)");
    app.add_option("--tau-min", c.tau_min)->capture_default_str();
    app.add_option("--tau-max", c.tau_max)->capture_default_str();
    app.add_option("--tau-count", c.tau_count)->capture_default_str();
    app.add_option("--h-min", c.h_min)->capture_default_str();
    app.add_option("--h-max", c.h_max)->capture_default_str();
    app.add_option("--h-count", c.h_count)->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads for scans (default GABOR_THREADS or all cores)");
    app.add_flag("--quick", c.quick, "check-identities: smaller grids, relaxed tolerances");
    app.add_option("--dump-grids", c.dump_grids, "check-identities: directory for A/W grid samples");

    app.add_subcommand("bounds", "optimal frame bounds A, B (JSON)");
    app.add_subcommand("verify", "check odd window / symplectic lattice / density 2^d and the vanishing bound");
    app.add_subcommand("scan", "bound surface over lattice shapes (CSV)");
    app.add_subcommand("check-identities", "Poisson, symplectic Fourier and vanishing-sum suites (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return gabor::cli::kInvalidConfig;
    }
    c.command = app.get_subcommands().front()->get_name();
    c.volume = volume;
    c.density = density;
    return gabor::cli::run(c);
}
