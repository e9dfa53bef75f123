#include "stefanlab/dispatch.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"stefanlab: stochastic moving-boundary simulation laboratory"};
    std::string config_path;
    std::string out_dir;
    unsigned long long seed_override = 0;
    bool has_seed = false;
    int threads = 1;
    bool dry_run = false;

    app.add_option("--config", config_path, "run configuration file")->required();
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--out", out_dir, "output directory (default: $STEFANLAB_OUT or ./stefanlab_out)");
    app.add_option("--threads", threads, "ensemble worker count")->check(CLI::PositiveNumber);
    app.add_flag("--dry-run", dry_run, "validate the config and write the manifest only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }
    has_seed = seed_opt->count() > 0;

    if (out_dir.empty()) {
        const char* env = std::getenv("STEFANLAB_OUT");
        out_dir = env ? env : "./stefanlab_out";
    }

    try {
        stefanlab::ResolvedConfig cfg = stefanlab::parse_config(config_path);
        if (has_seed) {
            cfg.seed = seed_override;
            for (auto& e : cfg.echo)
                if (e[0] == "solver" && e[1] == "seed") e[2] = std::to_string(cfg.seed);
        }
        const int status = stefanlab::dispatch(cfg, out_dir, threads, dry_run);
        if (status == 0)
            std::cout << "ok: " << cfg.experiment << " -> " << out_dir << "\n";
        else
            std::cout << "experiment failed (status 1): " << cfg.experiment << " -> " << out_dir
                      << "\n";
        return status;
    } catch (const stefanlab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
