/*
 * Copyright 2026 The cssmetro Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to cssmetro.
 *
 * Every fallible call returns a cm_status. On failure the message is
 * available from cm_last_error() until the next call on the same thread.
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Strings returned through char** are released with
 * cm_string_free.
 */

#ifndef CSSMETRO_H
#define CSSMETRO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CM_API __declspec(dllexport)
#else
#define CM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cm_status {
    CM_OK = 0,
    CM_ERR_INVALID_ARGUMENT = 1,
    CM_ERR_RANK_DEFICIENT = 2,
    CM_ERR_DOMAIN = 3,
    CM_ERR_SIZE = 4,
    CM_ERR_PARSE = 5,
    CM_ERR_IO = 6,
    CM_ERR_NUMERICAL = 7,
    CM_ERR_STEP_SIZE = 8,
    CM_ERR_ESTIMATION = 9,
    CM_ERR_INTERNAL = 10
} cm_status;

typedef enum cm_channel_kind {
    CM_CHANNEL_DEPHASING = 0,
    CM_CHANNEL_BITFLIP = 1,
    CM_CHANNEL_MIXED = 2,
    CM_CHANNEL_MIXTURE = 3
} cm_channel_kind;

typedef struct cm_code cm_code;
typedef struct cm_trajectory cm_trajectory;
typedef struct cm_curve cm_curve;

typedef struct cm_channel {
    cm_channel_kind kind;
    double p;
    double theta;
    double phi; /* used by MIXED and MIXTURE only */
} cm_channel;

typedef struct cm_sim_config {
    cm_channel channel;
    double t_max;
    double dt;
    int sample_every;
    int check_positivity;
} cm_sim_config;

typedef struct cm_integrator_stats {
    uint64_t steps;
    double max_trace_drift;
    double max_hermiticity_defect;
    double min_eigenvalue; /* NaN when positivity was not checked */
} cm_integrator_stats;

typedef struct cm_estimate_result {
    double theta_hat;
    double gamma_hat;
    double residual;
    double amplitude;
    double offset;
    double theta_stderr;
    double ci_low; /* theta_hat -/+ 1.96 stderr, a heuristic interval */
    double ci_high;
    double theta_initial;
} cm_estimate_result;

CM_API const char *cm_version(void);
CM_API const char *cm_last_error(void);
CM_API const char *cm_status_name(cm_status status);
CM_API void cm_string_free(char *s);

/* Defaults: dephasing, p = 0.05, theta = 1e-3, t_max = 100, dt = 0.01. */
CM_API void cm_sim_config_default(cm_sim_config *config);
CM_API cm_status cm_channel_parse(const char *name, cm_channel_kind *kind);
CM_API const char *cm_channel_name(cm_channel_kind kind);

/* Codes. */
CM_API cm_status cm_code_from_file(const char *path, cm_code **out);
CM_API cm_status cm_code_from_text(const char *text, cm_code **out);
/* "ghzN", "repN", "trivialN" or "steane". */
CM_API cm_status cm_code_builtin(const char *name, cm_code **out);
CM_API cm_status cm_code_from_rows(const char *const *rows, size_t count, int n, cm_code **out);
CM_API void cm_code_free(cm_code *code);
CM_API int cm_code_length(const cm_code *code);
CM_API int cm_code_dimension(const cm_code *code);
/* Code file text (header line plus generator rows). */
CM_API cm_status cm_code_format(const cm_code *code, char **text_out);
CM_API cm_status cm_code_q_pure(const cm_code *code, double *q_pure, int *degenerate);
CM_API cm_status cm_code_gamma(const cm_code *code, const cm_channel *channel, double *gamma);

/* JSON report: code enumerators, Q_pure, robustness, bound slack and the
 * model damping of `channel`. */
CM_API cm_status cm_analyze_json(const cm_code *code, const cm_channel *channel, char **json_out);

/* Trajectories. */
CM_API cm_status cm_simulate(const cm_code *code, const cm_sim_config *config, cm_trajectory **out);
CM_API cm_status cm_trajectory_from_arrays(const double *times, const double *probabilities, size_t count,
                                           cm_trajectory **out);
CM_API void cm_trajectory_free(cm_trajectory *trajectory);
CM_API size_t cm_trajectory_size(const cm_trajectory *trajectory);
CM_API double cm_trajectory_time(const cm_trajectory *trajectory, size_t index);
CM_API double cm_trajectory_probability(const cm_trajectory *trajectory, size_t index);
CM_API int cm_trajectory_is_analytic(const cm_trajectory *trajectory);
CM_API cm_status cm_trajectory_stats(const cm_trajectory *trajectory, cm_integrator_stats *stats);
/* Binomial resampling with `copies` probes per time; copies = 0 copies. */
CM_API cm_status cm_trajectory_sample(const cm_trajectory *trajectory, unsigned copies, uint64_t seed,
                                      cm_trajectory **out);
/* Damped-cosine model of `channel` on the time grid of `grid`. */
CM_API cm_status cm_trajectory_analytic(const cm_code *code, const cm_channel *channel, const cm_trajectory *grid,
                                        cm_trajectory **out);
/* Atomic write (temporary file + rename). `analytic` may be NULL. */
CM_API cm_status cm_trajectory_write_csv(const cm_trajectory *trajectory, const cm_trajectory *analytic,
                                         const char *path);
/* Same CSV as a string. */
CM_API cm_status cm_trajectory_to_csv(const cm_trajectory *trajectory, const cm_trajectory *analytic, char **csv_out);
CM_API cm_status cm_trajectory_read_csv(const char *path, cm_trajectory **out);

/* Cramer-Rao curves. fd_step <= 0 selects theta / 100. */
CM_API cm_status cm_crb(const cm_code *code, const cm_sim_config *config, double fd_step, cm_curve **out);
CM_API void cm_curve_free(cm_curve *curve);
CM_API size_t cm_curve_size(const cm_curve *curve);
CM_API double cm_curve_time(const cm_curve *curve, size_t index);
CM_API double cm_curve_delta_theta(const cm_curve *curve, size_t index);
CM_API int cm_curve_reliable(const cm_curve *curve, size_t index);
CM_API cm_status cm_curve_write_csv(const cm_curve *curve, const char *path);
CM_API cm_status cm_curve_to_csv(const cm_curve *curve, char **csv_out);

/* Estimation. */
CM_API cm_status cm_estimate(const cm_trajectory *trajectory, double q_pure, int free_amplitude,
                             cm_estimate_result *out);

/* Runs the shipped oracle fixtures; JSON array of reports. `all_passed` may
 * be NULL. */
CM_API cm_status cm_oracle_json(char **json_out, int *all_passed);

#ifdef __cplusplus
}
#endif

#endif /* CSSMETRO_H */
