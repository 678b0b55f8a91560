/*
 * spectator: Monte Carlo simulation of real-time qubit calibration from
 * spectator-qubit measurements.
 *
 * Every function returns an spq_status. On failure the calling thread's
 * spq_last_error() holds a message, and output parameters are left untouched.
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function (passing NULL is allowed).
 */
#ifndef SPECTATOR_SPECTATOR_H
#define SPECTATOR_SPECTATOR_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPQ_BUILDING_LIBRARY)
#define SPQ_API __attribute__((visibility("default")))
#else
#define SPQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spq_status {
    SPQ_OK = 0,
    SPQ_ERR_INVALID_ARGUMENT = 1,
    SPQ_ERR_CONFIG = 2,
    SPQ_ERR_DOMAIN = 3,
    SPQ_ERR_INVALID_AXIS = 4,
    SPQ_ERR_RUNAWAY = 5,
    SPQ_ERR_DEGENERATE = 6,
    SPQ_ERR_TALLY = 7,
    SPQ_ERR_INVALID_TARGET = 8,
    SPQ_ERR_INFEASIBLE_BUDGET = 9,
    SPQ_ERR_CURVATURE = 10,
    SPQ_ERR_IO = 11,
    SPQ_ERR_INTERNAL = 12
} spq_status;

typedef struct spq_config spq_config;
typedef struct spq_trace spq_trace;
typedef struct spq_grid spq_grid;

SPQ_API const char *spq_version(void);
SPQ_API const char *spq_status_name(spq_status status);
/* Message of the last failed call on this thread ("" if none). */
SPQ_API const char *spq_last_error(void);
/* Nonzero for errors caused by the caller's input rather than by the run. */
SPQ_API int spq_status_is_validation(spq_status status);

/* ---- configuration ---- */

/* Defaults of a scenario: bfield-perp, bfield-xy4, beam-delta, beam-eps, beam-eps-linear. */
SPQ_API spq_status spq_config_default(const char *scenario, spq_config **out);
/* Parses `key = value` text. `scenario` may be NULL when the text names one. */
SPQ_API spq_status spq_config_parse(const char *text, const char *scenario, spq_config **out);
/* Sets one key with the same syntax as a config line, e.g. ("beam_delta.M", "400"). */
SPQ_API spq_status spq_config_set(spq_config *cfg, const char *key, const char *value);
/* Full config as text; release with spq_string_free. */
SPQ_API spq_status spq_config_serialize(const spq_config *cfg, char **out_text);
/* Config text preceded by a version comment, written atomically; reparses as a config. */
SPQ_API spq_status spq_config_write_manifest(const spq_config *cfg, const char *path);
SPQ_API void spq_config_free(spq_config *cfg);
SPQ_API void spq_string_free(char *s);

/* ---- scenarios ---- */

/* Monte Carlo of both variants; threads = 0 uses every core. */
SPQ_API spq_status spq_run_scenario(const spq_config *cfg, unsigned threads, spq_trace **spec, spq_trace **nospec);
SPQ_API size_t spq_trace_length(const spq_trace *trace);
/* Step index is 0-based; entry i describes step i + 1. */
SPQ_API spq_status spq_trace_get(const spq_trace *trace, size_t index, double *mean_infidelity, double *stderr_out);
SPQ_API int64_t spq_trace_runs(const spq_trace *trace);
SPQ_API int64_t spq_trace_censored(const spq_trace *trace);
SPQ_API const char *spq_trace_scenario(const spq_trace *trace);
/* First step with mean infidelity above threshold, or 0 when it never crosses. */
SPQ_API spq_status spq_trace_crossing(const spq_trace *trace, double threshold, int64_t *step);
/* One CSV holding every given trace. */
SPQ_API spq_status spq_traces_write_csv(const spq_trace *const *traces, size_t count, const char *path);
SPQ_API void spq_trace_free(spq_trace *trace);

/* ---- landscape sweeps ---- */

/* metrics: "infidelity-ratio", "threshold-time-ratio" or "both". horizon = 0 means at_step. */
SPQ_API spq_status spq_run_sweep(const spq_config *tmpl, const int64_t *m_grid, size_t m_count,
                                 const double *step_grid, size_t step_count, const char *metrics, int64_t at_step,
                                 int64_t horizon, double threshold, unsigned threads, spq_grid **out);
SPQ_API size_t spq_grid_size(const spq_grid *grid);
SPQ_API spq_status spq_grid_cell(const spq_grid *grid, size_t index, int64_t *m, double *step_size,
                                 const char **metric, double *value, const char **flag);
SPQ_API spq_status spq_grid_write_csv(const spq_grid *grid, const char *path);
SPQ_API void spq_grid_free(spq_grid *grid);

/* ---- closed forms ---- */

/* phi_s <= 0 selects phi_s = 1 / (2 sqrt(n)). */
SPQ_API spq_status spq_oracle_remainder_linear(int64_t n, double phi_s, double *out);
/* CSV with columns n,phi_sq,remainder for n = 1..n_max at phi_s = 1/(2 sqrt(n)). */
SPQ_API spq_status spq_oracle_remainder_csv(int64_t n_max, const char *path);
/* Both sides of the Taylor sufficient condition for F = cos^2(n phi). */
SPQ_API spq_status spq_oracle_taylor_linear(int64_t n, double phi_s, double *lhs, double *rhs);
SPQ_API spq_status spq_oracle_avg_f_nospec_delta(int64_t n, double delta0, double ddelta, double delta_bar,
                                                 double *out);
SPQ_API spq_status spq_oracle_avg_f_nospec_eps(int64_t n, double eps0, double deps, double eps_bar, double *out);
SPQ_API spq_status spq_oracle_fidelity_sk1(double a, double *out);
SPQ_API spq_status spq_oracle_fidelity_plain(double a, double *out);

/* Law of the windowed walk average of cycle k; printed_variance is the closed-form diagnostic. */
SPQ_API spq_status spq_estimator_moments(int64_t k, int64_t m, double theta0, double theta_end, double step,
                                         double *mean, double *variance, double *printed_variance);

/* ---- robust phase estimation ---- */

typedef struct spq_rpe_result {
    int64_t budget;
    int32_t depth;
    int64_t runs;
    int64_t shots_per_generation;
    int64_t max_gates_used;
    double mean_abs_error;
    double abs_error_stderr;
    double shot_noise;
    double crb;
} spq_rpe_result;

SPQ_API spq_status spq_rpe_deepest_feasible(int64_t budget, int32_t *depth);
SPQ_API spq_status spq_run_rpe(int64_t budget, int32_t depth, int64_t runs, uint64_t seed, unsigned threads,
                               spq_rpe_result *out);
SPQ_API spq_status spq_rpe_write_csv(const spq_rpe_result *rows, size_t count, const char *path);

#ifdef __cplusplus
}
#endif

#endif
