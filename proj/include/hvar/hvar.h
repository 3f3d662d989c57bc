/* hvar: nonlocal variational problems on the Heisenberg group.
 *
 * C interface of the shared library. All functions return an hvar_status;
 * on failure the thread-local message from hvar_last_error() describes the
 * problem. Objects are opaque handles released with their *_free function.
 */
#ifndef HVAR_H
#define HVAR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hvar_status {
    HVAR_OK = 0,
    HVAR_ERROR_USAGE = 2,        /* bad arguments, invalid config, IO trouble  */
    HVAR_ERROR_SOLVER = 3,       /* iteration cap reached, stagnation          */
    HVAR_ERROR_VERIFICATION = 4, /* a configured verification failed           */
    HVAR_ERROR_RESOURCE = 5,     /* configured resource cap exceeded           */
    HVAR_ERROR_IO = 6,           /* file read/write failure                    */
    HVAR_ERROR_INTERNAL = 99
} hvar_status;

typedef struct hvar_config hvar_config;
typedef struct hvar_grid hvar_grid;
typedef struct hvar_kernel hvar_kernel;

const char* hvar_version(void);
/* Message for the most recent failing call on this thread ("" if none). */
const char* hvar_last_error(void);

/* ------------------------------------------------------------------ */
/* Experiment configs (versioned JSON, unknown keys rejected)          */
/* ------------------------------------------------------------------ */
hvar_status hvar_config_load(const char* path, hvar_config** out);
hvar_status hvar_config_parse(const char* json_text, hvar_config** out);
void hvar_config_free(hvar_config* config);

typedef struct hvar_run_options {
    const char* out_dir; /* NULL = current directory */
    int threads;         /* <=0 = 1 */
    int quiet;           /* nonzero silences progress lines */
} hvar_run_options;

/* Execute the configured pipeline; writes CSV and JSON outputs. */
hvar_status hvar_run(const hvar_config* config, const hvar_run_options* options);
/* Identity suites (group axioms, commutators, admissibility, duality, form). */
hvar_status hvar_verify(const hvar_config* config, const hvar_run_options* options);
hvar_status hvar_export_grid(const hvar_config* config, const hvar_run_options* options);

/* ------------------------------------------------------------------ */
/* Group arithmetic on flat coordinates (x_1..x_N, y_1..y_N, t)        */
/* ------------------------------------------------------------------ */
hvar_status hvar_group_multiply(int n, const double* a, const double* b, double* out);
hvar_status hvar_group_inverse(int n, const double* a, double* out);
hvar_status hvar_group_dilate(int n, double theta, const double* a, double* out);
hvar_status hvar_group_knorm(int n, const double* a, double* out);

/* ------------------------------------------------------------------ */
/* Kernels                                                             */
/* ------------------------------------------------------------------ */
hvar_status hvar_kernel_fractional(double s, int n, double scale, hvar_kernel** out);
hvar_status hvar_kernel_eval(const hvar_kernel* kernel, const double* xi, double* out);
void hvar_kernel_free(hvar_kernel* kernel);

/* ------------------------------------------------------------------ */
/* Grids                                                               */
/* ------------------------------------------------------------------ */
hvar_status hvar_grid_build(const hvar_config* config, hvar_grid** out);
hvar_status hvar_grid_counts(const hvar_grid* grid, size_t* nodes, size_t* interior);
hvar_status hvar_grid_export_csv(const hvar_grid* grid, const char* path);
void hvar_grid_free(hvar_grid* grid);

#ifdef __cplusplus
}
#endif

#endif /* HVAR_H */
