// nashvar command line: run scenario configs, verify solved scenarios, list
// the bundled example configs. Talks to the core exclusively through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nashvar.h"

namespace {

int report_status(nv_status status) {
    if (status != NV_OK) {
        std::fprintf(stderr, "error (%d): %s\n", static_cast<int>(status), nv_last_error());
    }
    return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nash equilibria of VaR-constrained portfolio games"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir; // empty: the config's output directory (default ./out)
    long long seed = -1;
    std::string grid;
    double perturb = 0.0;
    std::string format = "csv";

    CLI::App* run = app.add_subcommand("run", "solve a scenario config and write its outputs");
    run->add_option("--config", config_path, "scenario config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: the config output field or ./out)");
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--grid", grid, "override the payoff grid as min:max:points");
    run->add_option("--format", format, "output format (csv)");

    CLI::App* verify = app.add_subcommand("verify", "re-solve a scenario and verify it");
    verify->add_option("--config", config_path, "scenario config (JSON)")->required();
    verify->add_option("--out", out_dir, "output directory holding a previous run");
    verify->add_option("--debug-perturb-lambda", perturb,
                       "scale the solved multiplier(s) by 1+eps before verifying");

    CLI::App* list = app.add_subcommand("list-examples", "list the bundled example configs");
    std::string write_dir;
    list->add_option("--out", write_dir, "materialize the example configs into this directory");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        if (format != "csv") {
            std::fprintf(stderr, "error: unsupported format '%s'\n", format.c_str());
            return NV_ERR_INVALID_CONFIG;
        }
        nv_status status = nv_run_scenario(config_path.c_str(), out_dir.c_str(), seed,
                                           grid.empty() ? nullptr : grid.c_str());
        if (status == NV_OK) {
            std::printf("run complete; see the output directory for summary.json and manifest.json\n");
        } else {
            std::fprintf(stderr, "run finished with status %d: %s\n", static_cast<int>(status),
                         nv_last_error());
        }
        return static_cast<int>(status);
    }

    if (*verify) {
        std::vector<char> report(1 << 16);
        nv_status status = nv_verify_scenario(config_path.c_str(), out_dir.c_str(), perturb,
                                              report.data(), report.size());
        std::fputs(report.data(), stdout);
        if (status == NV_OK) {
            std::printf("verification passed\n");
            return 0;
        }
        if (status == NV_ERR_VERIFICATION_FAILED) {
            std::printf("verification FAILED\n");
            return static_cast<int>(status);
        }
        return report_status(status);
    }

    if (*list) {
        if (!write_dir.empty()) std::filesystem::create_directories(write_dir);
        int n = nv_example_count();
        for (int i = 0; i < n; ++i) {
            std::printf("%-10s %s\n", nv_example_name(i), nv_example_description(i));
            if (!write_dir.empty()) {
                std::string path = write_dir + "/" + nv_example_name(i) + ".json";
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                if (!out) {
                    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
                    return NV_ERR_IO;
                }
                out << nv_example_text(i);
            }
        }
        if (!write_dir.empty()) std::printf("wrote %d configs to %s\n", n, write_dir.c_str());
        return 0;
    }

    return 0;
}
