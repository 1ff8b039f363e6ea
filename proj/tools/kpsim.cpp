#include <iostream>

#include "CLI11.hpp"
#include "kpv/cli_io.hpp"
#include "kpv/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kpsim: KP evolution with virial and decay diagnostics"};
    app.require_subcommand(1);

    std::string config, out = "out", snapshot;
    int workers = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "YAML run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->capture_default_str();
    };
    auto* run = app.add_subcommand("run", "evolve one configuration, write CSV, metadata, snapshots, plot script");
    auto* verify = app.add_subcommand("verify", "run the named checks and print one line per check");
    auto* sweep = app.add_subcommand("sweep", "run the cartesian product of the sweep lists");
    auto* diag = app.add_subcommand("diag", "recompute one diagnostics row from a snapshot");
    for (auto* s : {run, verify, sweep, diag}) add_common(s);
    run->get_option("--config")->required();
    sweep->get_option("--config")->required();
    diag->get_option("--config")->required();
    sweep->add_option("--workers", workers, "worker threads (default: KPV_WORKERS or hardware concurrency)");
    diag->add_option("--snapshot", snapshot, "KPF1 snapshot file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    kpv::RunConfig cfg;
    try {
        if (!config.empty()) cfg = kpv::load_config(config);
    } catch (const std::exception& e) {
        std::cerr << config << ": " << e.what() << '\n';
        return 1;
    }
    if (*run) return kpv::cmd_run(cfg, out, std::cerr);
    if (*verify) return kpv::cmd_verify(cfg, out, std::cout, std::cerr);
    if (*sweep) return kpv::cmd_sweep(cfg, out, std::cerr, workers);
    return kpv::cmd_diag(cfg, snapshot, out, std::cout, std::cerr);
}
