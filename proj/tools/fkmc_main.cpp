// Command line front end: loads a config, applies overrides, runs it.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "fkmc/config.hpp"
#include "fkmc/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo magnetic semigroup experiments"};
    std::string config_path;
    app.add_option("-c,--config", config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override [run] seed");
    int threads = -1;
    auto* threads_opt =
        app.add_option("--threads", threads, "override [run] threads (0 = hardware)");
    std::string out_dir;
    auto* out_opt = app.add_option("--out", out_dir, "override [run] out_dir");
    bool svg = false;
    auto* svg_flag = app.add_flag("--svg", svg, "also render an SVG plot");

    CLI11_PARSE(app, argc, argv);

    try {
        fkmc::RunConfig cfg = fkmc::parse_config_file(config_path);
        if (*seed_opt) cfg.seed = seed;
        if (*threads_opt) {
            if (threads < 0) throw fkmc::ConfigError("--threads must be >= 0");
            cfg.threads = threads;
        }
        if (*out_opt) cfg.out_dir = out_dir;
        if (*svg_flag) cfg.svg = true;

        const fkmc::RunResult result = fkmc::run(cfg);
        std::printf("%s\n", result.summary.c_str());
        std::printf("wrote %s\n", result.csv_path.c_str());
        if (!result.svg_path.empty()) std::printf("wrote %s\n", result.svg_path.c_str());
        if (result.thresholds_checked)
            std::printf("thresholds %s\n", result.thresholds_met ? "met" : "FAILED");
        return result.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
