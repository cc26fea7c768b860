#include "edgelab/config.hpp"
#include "edgelab/errors.hpp"
#include "edgelab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Edgeworth and Wasserstein diagnostics for volatility models", "edgeworth-lab"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    std::string config_path;
    std::optional<std::size_t> workers;
    std::optional<std::string> out_dir;
    bool warn_only = false;
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--workers", workers, "Worker threads (0 = one per hardware thread)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--warn-only", warn_only, "Report failed assumption checks without exit code 2");

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = edgelab::load_experiment(config_path);
        if (workers) {
            cfg.workers = *workers;
        } else if (const char* env = std::getenv("EDGEWORTH_LAB_WORKERS")) {
            try {
                cfg.workers = std::stoul(env);
            } catch (const std::exception&) {
                throw edgelab::ConfigError("EDGEWORTH_LAB_WORKERS", "expected a non-negative integer");
            }
        }
        if (out_dir) cfg.out_dir = *out_dir;
        if (warn_only) cfg.warn_only = true;
        const int code = edgelab::run_and_write(cfg);
        if (code != 0)
            std::cerr << "edgeworth-lab: finished with exit code " << code
                      << (code == 2 ? " (assumption checks failed)" : " (see error rows)") << "\n";
        return code;
    } catch (const std::exception& e) {
        std::cerr << "edgeworth-lab: error: " << e.what() << "\n";
        return 1;
    }
}
