/* feedflow C API: opaque handles over the biomass pre-processing control
 * library. Every entry point returns an ffw_status; details for the last
 * failure on the calling thread are available via ffw_last_error(). */
#ifndef FEEDFLOW_FEEDFLOW_H
#define FEEDFLOW_FEEDFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FFW_API __declspec(dllexport)
#else
#define FFW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ffw_status {
    FFW_OK = 0,
    FFW_ERROR_INFEASIBLE = 1,
    FFW_ERROR_PARSE = 2,
    FFW_ERROR_INVARIANT = 3,
    FFW_ERROR_SOLVER_LIMIT = 4,
    FFW_ERROR_IO = 5,
    FFW_ERROR_ARGUMENT = 6,
    FFW_ERROR_INTERNAL = 7
} ffw_status;

typedef struct ffw_scenario ffw_scenario;
typedef struct ffw_run ffw_run;

FFW_API const char* ffw_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
FFW_API const char* ffw_last_error(void);

/* Frees any string returned by an _alloc function. */
FFW_API void ffw_string_free(char* s);

FFW_API ffw_status ffw_scenario_load(const char* path, ffw_scenario** out);
FFW_API void ffw_scenario_free(ffw_scenario* scenario);

/* FFW_OK when scenario and graph are valid; FFW_ERROR_INVARIANT otherwise,
 * with one diagnostic per line in *diagnostics (caller frees). diagnostics
 * may be NULL. */
FFW_API ffw_status ffw_scenario_validate(const ffw_scenario* scenario, char** diagnostics);

typedef struct ffw_run_options {
    const char* control;    /* "bffpc" | "hpc" (default "hpc") */
    const char* milling;    /* "with" | "without" | NULL = scenario default */
    const char* pattern;    /* pattern string | NULL = scenario default */
    double delta_minutes;   /* 0 = scenario default */
    double horizon_hours;   /* solve runs: 0 = initial horizon */
    const char* expansion;  /* "optimized" | "fixed" (default "optimized") */
    int bisect;             /* min-time: binary search instead of linear */
    int64_t seed;           /* >= 0 overrides a random pattern's seed */
    int64_t iteration_limit;/* 0 = FEEDFLOW_SOLVER_ITER_LIMIT env or default */
    int threads;            /* 0 = hardware concurrency */
} ffw_run_options;

FFW_API void ffw_run_options_init(ffw_run_options* options);

/* Fixed-horizon optimal solve / iterative minimum-processing-time run. */
FFW_API ffw_status ffw_solve(const ffw_scenario* scenario, const ffw_run_options* options,
                             ffw_run** out);
FFW_API ffw_status ffw_min_time(const ffw_scenario* scenario, const ffw_run_options* options,
                                ffw_run** out);
FFW_API void ffw_run_free(ffw_run* run);

FFW_API int64_t ffw_run_period_count(const ffw_run* run);
FFW_API double ffw_run_delta_minutes(const ffw_run* run);
FFW_API double ffw_run_horizon_hours(const ffw_run* run);
FFW_API double ffw_run_expansion(const ffw_run* run); /* chosen k* */

/* Reactor feeding rate per period, dry Mg/h. Writes min(capacity, periods)
 * values; returns the full period count. */
FFW_API int64_t ffw_run_reactor_feed(const ffw_run* run, double* buffer, int64_t capacity);

FFW_API ffw_status ffw_run_kpis_json_alloc(const ffw_run* run, char** out);

/* trajectory.csv, kpis.json, SVG charts (and iterations.csv for min-time
 * runs) under out_dir. */
FFW_API ffw_status ffw_run_write_artifacts(const ffw_run* run, const char* out_dir);

/* KPI comparison of two runs: JSON report (caller frees); table may be NULL.
 * When out_dir is non-NULL also writes comparison artifacts there. */
FFW_API ffw_status ffw_compare_alloc(const ffw_run* a, const ffw_run* b, const char* out_dir,
                                     char** json, char** table);

/* Writes the configured model as fixed-format MPS plus the name-table
 * sidecar (<path>.names.csv). */
FFW_API ffw_status ffw_export_mps(const ffw_scenario* scenario, const ffw_run_options* options,
                                  const char* mps_path);

#ifdef __cplusplus
}
#endif

#endif /* FEEDFLOW_FEEDFLOW_H */
