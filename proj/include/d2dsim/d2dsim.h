#ifndef D2DSIM_D2DSIM_H
#define D2DSIM_D2DSIM_H

/*
 * C interface to the D2D underlay simulator.
 *
 * Objects are opaque handles created and released by the library. Every
 * fallible call returns a d2d_status; on failure a one-line description is
 * available from d2d_last_error() on the same thread until the next call.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(D2DSIM_BUILDING_LIBRARY)
#define D2DSIM_API __attribute__((visibility("default")))
#else
#define D2DSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum d2d_status {
  D2D_OK = 0,
  D2D_ERR_INVALID_ARGUMENT = 1, /* null handle, bad parameter value */
  D2D_ERR_CONFIG = 2,           /* unknown key, malformed value, contradiction */
  D2D_ERR_IO = 3,               /* unreadable config, unwritable output */
  D2D_ERR_INTERNAL = 4
} d2d_status;

typedef struct d2d_config d2d_config;
typedef struct d2d_report d2d_report;

D2DSIM_API const char* d2d_version(void);
D2DSIM_API const char* d2d_last_error(void);
D2DSIM_API const char* d2d_status_name(d2d_status status);

/* Configuration ---------------------------------------------------------- */

D2DSIM_API d2d_status d2d_config_new(d2d_config** out);
/* Parses a `key = value` file. Errors carry "path:line: reason". */
D2DSIM_API d2d_status d2d_config_load(const char* path, d2d_config** out);
/* Sets one key using the file syntax, e.g. ("coordination", "reuse:2"). */
D2DSIM_API d2d_status d2d_config_set(d2d_config* cfg, const char* key, const char* value);
D2DSIM_API d2d_status d2d_config_validate(const d2d_config* cfg);
/* Copies the resolved `key = value` echo into buf (NUL-terminated, truncated
 * to len). *needed, when non-null, receives the full length plus one. */
D2DSIM_API d2d_status d2d_config_echo(const d2d_config* cfg, char* buf, size_t len, size_t* needed);
D2DSIM_API const char* d2d_config_out_dir(const d2d_config* cfg);
D2DSIM_API void d2d_config_free(d2d_config* cfg);

/* Running ---------------------------------------------------------------- */

/* 0 = hardware concurrency. Results do not depend on the thread count. */
D2DSIM_API void d2d_set_threads(unsigned threads);
D2DSIM_API d2d_status d2d_run(const d2d_config* cfg, d2d_report** out);

/* Reports ---------------------------------------------------------------- */

typedef enum d2d_experiment { D2D_EXPERIMENT_SINR = 0, D2D_EXPERIMENT_THROUGHPUT = 1 } d2d_experiment;

D2DSIM_API d2d_experiment d2d_report_experiment(const d2d_report* report);
/* SINR samples, or flows per run (baseline and offload each) for throughput. */
D2DSIM_API size_t d2d_report_sample_count(const d2d_report* report);
D2DSIM_API size_t d2d_report_setting_count(const d2d_report* report);
/* Fraction of SINR samples strictly above the coverage threshold for one
 * sweep setting. */
D2DSIM_API d2d_status d2d_report_fraction_above(const d2d_report* report, size_t setting, double* out);
/* Throughput summary; run 0 = baseline, 1 = offload. */
D2DSIM_API d2d_status d2d_report_throughput(const d2d_report* report, int run, double* mean_bps, double* p5_bps);
D2DSIM_API double d2d_report_wall_clock_s(const d2d_report* report);
D2DSIM_API d2d_status d2d_report_summary(const d2d_report* report, char* buf, size_t len, size_t* needed);
/* Writes the CSV, summary.txt and manifest.txt into out_dir (created if
 * missing). */
D2DSIM_API d2d_status d2d_report_write(const d2d_report* report, const char* out_dir);
D2DSIM_API void d2d_report_free(d2d_report* report);

/* Discovery resource reservation ----------------------------------------- */

D2DSIM_API d2d_status d2d_discovery_overhead(uint64_t reserved_subframes, double period_s,
                                             double* capacity_fraction, double* sleep_fraction);

#ifdef __cplusplus
}
#endif

#endif /* D2DSIM_D2DSIM_H */
