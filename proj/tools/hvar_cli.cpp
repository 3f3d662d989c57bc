// Command-line front-end; talks to the shared library through the C API only.
//
// Exit codes: 0 success, 2 validation/config/IO error, 3 solver failure,
// 4 verification failure.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "hvar/hvar.h"

namespace {

int map_exit_code(hvar_status status) {
    switch (status) {
        case HVAR_OK: return 0;
        case HVAR_ERROR_USAGE:
        case HVAR_ERROR_RESOURCE:
        case HVAR_ERROR_IO: return 2;
        case HVAR_ERROR_SOLVER:
        case HVAR_ERROR_INTERNAL: return 3;
        case HVAR_ERROR_VERIFICATION: return 4;
    }
    return 3;
}

int run_action(const std::string& config_path, const hvar_run_options& options,
               hvar_status (*action)(const hvar_config*, const hvar_run_options*)) {
    hvar_config* config = nullptr;
    hvar_status status = hvar_config_load(config_path.c_str(), &config);
    if (status == HVAR_OK) {
        status = action(config, &options);
        hvar_config_free(config);
    }
    if (status != HVAR_OK && !options.quiet)
        std::fprintf(stderr, "hvar: %s\n", hvar_last_error());
    return map_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal obstacle and mountain-pass problems on the Heisenberg group"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand

    std::string out_dir = ".";
    int threads = 1;
    bool quiet = false;
    app.add_option("--out-dir", out_dir, "directory for CSV/JSON outputs");
    app.add_option("--threads", threads, "assembly worker threads");
    app.add_flag("--quiet", quiet, "suppress progress lines");

    std::string run_config, verify_config, export_config;
    CLI::App* cmd_run = app.add_subcommand("run", "execute the configured pipeline");
    cmd_run->add_option("config", run_config, "experiment config (JSON)")->required();
    CLI::App* cmd_verify = app.add_subcommand("verify", "run the identity suites");
    cmd_verify->add_option("config", verify_config, "experiment config (JSON)")->required();
    CLI::App* cmd_export = app.add_subcommand("export-grid", "write the grid CSV");
    cmd_export->add_option("config", export_config, "experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    hvar_run_options options{};
    options.out_dir = out_dir.c_str();
    options.threads = threads;
    options.quiet = quiet ? 1 : 0;

    if (cmd_run->parsed()) return run_action(run_config, options, hvar_run);
    if (cmd_verify->parsed()) return run_action(verify_config, options, hvar_verify);
    if (cmd_export->parsed()) return run_action(export_config, options, hvar_export_grid);
    return 2;
}
