#include "hvar/hvar.h"

#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/io.hpp"
#include "core/runner.hpp"

namespace {

thread_local std::string g_last_error;

hvar_status fail(hvar_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Translate core exceptions to status codes at the library boundary.
template <typename Fn>
hvar_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const hvar::SolverError& e) {
        return fail(HVAR_ERROR_SOLVER, e.what());
    } catch (const hvar::ResourceError& e) {
        return fail(HVAR_ERROR_RESOURCE, e.what());
    } catch (const hvar::IoError& e) {
        return fail(HVAR_ERROR_IO, e.what());
    } catch (const hvar::UsageError& e) {
        return fail(HVAR_ERROR_USAGE, e.what());
    } catch (const std::exception& e) {
        return fail(HVAR_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(HVAR_ERROR_INTERNAL, "unknown error");
    }
}

hvar::RunOptions to_options(const hvar_run_options* options) {
    hvar::RunOptions opt;
    if (options) {
        if (options->out_dir) opt.out_dir = options->out_dir;
        opt.threads = options->threads > 0 ? options->threads : 1;
        opt.quiet = options->quiet != 0;
    }
    return opt;
}

hvar::GroupElement element_from_flat(int n, const double* a) {
    if (n < 1 || !a) throw hvar::UsageError("null coordinates or invalid N");
    Eigen::Map<const Eigen::VectorXd> coords(a, 2 * n + 1);
    return hvar::GroupElement::from_coords(n, coords);
}

void element_to_flat(const hvar::GroupElement& g, double* out) {
    const Eigen::VectorXd c = g.coords();
    std::memcpy(out, c.data(), sizeof(double) * static_cast<std::size_t>(c.size()));
}

}  // namespace

struct hvar_config {
    hvar::ExperimentConfig config;
};

struct hvar_grid {
    hvar::Grid grid;
};

struct hvar_kernel {
    hvar::KernelSpec kernel;
};

extern "C" {

const char* hvar_version(void) { return "0.1.0"; }

const char* hvar_last_error(void) { return g_last_error.c_str(); }

hvar_status hvar_config_load(const char* path, hvar_config** out) {
    return guarded([&]() -> hvar_status {
        if (!path || !out) return fail(HVAR_ERROR_USAGE, "null argument");
        *out = new hvar_config{hvar::ExperimentConfig::from_file(path)};
        return HVAR_OK;
    });
}

hvar_status hvar_config_parse(const char* json_text, hvar_config** out) {
    return guarded([&]() -> hvar_status {
        if (!json_text || !out) return fail(HVAR_ERROR_USAGE, "null argument");
        *out = new hvar_config{hvar::ExperimentConfig::from_json_text(json_text)};
        return HVAR_OK;
    });
}

void hvar_config_free(hvar_config* config) { delete config; }

hvar_status hvar_run(const hvar_config* config, const hvar_run_options* options) {
    return guarded([&]() -> hvar_status {
        if (!config) return fail(HVAR_ERROR_USAGE, "null config");
        const auto outcome = hvar::run_experiment(config->config, to_options(options));
        if (!outcome.verification_pass)
            return fail(HVAR_ERROR_VERIFICATION,
                        "verification failed; see " + outcome.report_path);
        return HVAR_OK;
    });
}

hvar_status hvar_verify(const hvar_config* config, const hvar_run_options* options) {
    return guarded([&]() -> hvar_status {
        if (!config) return fail(HVAR_ERROR_USAGE, "null config");
        const auto outcome = hvar::run_verify(config->config, to_options(options));
        if (!outcome.verification_pass)
            return fail(HVAR_ERROR_VERIFICATION,
                        "identity suite failed; see " + outcome.report_path);
        return HVAR_OK;
    });
}

hvar_status hvar_export_grid(const hvar_config* config, const hvar_run_options* options) {
    return guarded([&]() -> hvar_status {
        if (!config) return fail(HVAR_ERROR_USAGE, "null config");
        hvar::export_grid(config->config, to_options(options));
        return HVAR_OK;
    });
}

hvar_status hvar_group_multiply(int n, const double* a, const double* b, double* out) {
    return guarded([&]() -> hvar_status {
        if (!out || !b) return fail(HVAR_ERROR_USAGE, "null argument");
        element_to_flat(hvar::multiply(element_from_flat(n, a), element_from_flat(n, b)),
                        out);
        return HVAR_OK;
    });
}

hvar_status hvar_group_inverse(int n, const double* a, double* out) {
    return guarded([&]() -> hvar_status {
        if (!out) return fail(HVAR_ERROR_USAGE, "null argument");
        element_to_flat(hvar::inverse(element_from_flat(n, a)), out);
        return HVAR_OK;
    });
}

hvar_status hvar_group_dilate(int n, double theta, const double* a, double* out) {
    return guarded([&]() -> hvar_status {
        if (!out) return fail(HVAR_ERROR_USAGE, "null argument");
        element_to_flat(hvar::dilate(theta, element_from_flat(n, a)), out);
        return HVAR_OK;
    });
}

hvar_status hvar_group_knorm(int n, const double* a, double* out) {
    return guarded([&]() -> hvar_status {
        if (!out) return fail(HVAR_ERROR_USAGE, "null argument");
        *out = hvar::knorm(element_from_flat(n, a));
        return HVAR_OK;
    });
}

hvar_status hvar_kernel_fractional(double s, int n, double scale, hvar_kernel** out) {
    return guarded([&]() -> hvar_status {
        if (!out) return fail(HVAR_ERROR_USAGE, "null argument");
        *out = new hvar_kernel{hvar::KernelSpec::fractional(s, n, scale)};
        return HVAR_OK;
    });
}

hvar_status hvar_kernel_eval(const hvar_kernel* kernel, const double* xi, double* out) {
    return guarded([&]() -> hvar_status {
        if (!kernel || !out) return fail(HVAR_ERROR_USAGE, "null argument");
        *out = kernel->kernel.eval(element_from_flat(kernel->kernel.n(), xi));
        return HVAR_OK;
    });
}

void hvar_kernel_free(hvar_kernel* kernel) { delete kernel; }

hvar_status hvar_grid_build(const hvar_config* config, hvar_grid** out) {
    return guarded([&]() -> hvar_status {
        if (!config || !out) return fail(HVAR_ERROR_USAGE, "null argument");
        *out = new hvar_grid{config->config.build_grid()};
        return HVAR_OK;
    });
}

hvar_status hvar_grid_counts(const hvar_grid* grid, size_t* nodes, size_t* interior) {
    return guarded([&]() -> hvar_status {
        if (!grid) return fail(HVAR_ERROR_USAGE, "null grid");
        if (nodes) *nodes = static_cast<size_t>(grid->grid.node_count());
        if (interior) *interior = static_cast<size_t>(grid->grid.interior_count());
        return HVAR_OK;
    });
}

hvar_status hvar_grid_export_csv(const hvar_grid* grid, const char* path) {
    return guarded([&]() -> hvar_status {
        if (!grid || !path) return fail(HVAR_ERROR_USAGE, "null argument");
        hvar::write_grid_csv(grid->grid, path);
        return HVAR_OK;
    });
}

void hvar_grid_free(hvar_grid* grid) { delete grid; }

}  // extern "C"
