/* SPDX-License-Identifier: Apache-2.0 */
#ifndef AWM_AWM_H
#define AWM_AWM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AWM_API __declspec(dllexport)
#else
#define AWM_API __attribute__((visibility("default")))
#endif

typedef enum awm_status {
  AWM_OK = 0,
  AWM_ERR_ARGUMENT = 1,
  AWM_ERR_PARAMETER = 2,
  AWM_ERR_DOMAIN = 3,
  AWM_ERR_EXTRAPOLATION = 4,
  AWM_ERR_INTEGRABILITY = 5,
  AWM_ERR_UNDEFINED_REGIME = 6,
  AWM_ERR_INFEASIBLE = 7,
  AWM_ERR_STEP_SIZE = 8,
  AWM_ERR_DISCRETIZATION = 9,
  AWM_ERR_RANGE = 10,
  AWM_ERR_PARSE = 11,
  AWM_ERR_RECORD = 12,
  AWM_ERR_NO_CROSSOVER = 13,
  AWM_ERR_FIT_FAILED = 14,
  AWM_ERR_IO = 15,
  AWM_ERR_INTERNAL = 99
} awm_status;

typedef struct awm_policy awm_policy;
typedef struct awm_distribution awm_distribution;
typedef struct awm_run awm_run;
typedef struct awm_lorenz awm_lorenz;

AWM_API const char* awm_version(void);
AWM_API const char* awm_schema_version(void);
AWM_API const char* awm_rng_algorithm(void);
AWM_API const char* awm_status_name(awm_status status);
/* Message of the last failed call on this thread; empty after a success. */
AWM_API const char* awm_last_error(void);
/* Frees strings returned through char** out-parameters. */
AWM_API void awm_string_free(char* s);

/* Policies use the spec language of the command line: flat:0.2,
 * pareto:alpha=1,D=0, file:chi.csv, piecewise:0=0.1,10=0.2. */
AWM_API awm_status awm_policy_parse(const char* spec, double default_zeta, awm_policy** out);
AWM_API awm_status awm_policy_eval(const awm_policy* policy, double w, double* out);
AWM_API awm_status awm_policy_asymptotic(const awm_policy* policy, double* out);
AWM_API awm_status awm_policy_describe(const awm_policy* policy, char** out);
AWM_API void awm_policy_free(awm_policy* policy);

AWM_API awm_status awm_distribution_read(const char* csv_path, const char* json_path, awm_distribution** out);
AWM_API awm_status awm_distribution_write(const awm_distribution* dist, const char* csv_path,
                                          const char* json_path);
/* JSON with nodes, n_agents, total_wealth, lambda, delta, condensed_fraction, gini. */
AWM_API awm_status awm_distribution_summary(const awm_distribution* dist, char** json);
/* CSV F,L sampled at F = j/count and closed at (1, 1). */
AWM_API awm_status awm_distribution_lorenz_csv(const awm_distribution* dist, int count, char** csv);
AWM_API void awm_distribution_free(awm_distribution* dist);

/* request: zeta, lambda, n_agents, total_wealth, nodes, x_max, x_core, dt,
 * max_steps, steady_tol, stepping ("implicit"|"explicit"), flux
 * ("chang-cooper"|"upwind"). Non-convergence is reported, not an error. */
AWM_API awm_status awm_steady_state(const char* request_json, const awm_policy* policy, awm_distribution** dist,
                                    char** report_json);

/* request: n_agents, zeta, lambda, total_wealth, dt, kappa, sweeps, seed,
 * snapshot_stride, keep_snapshots, average_from, init ("equal"|"exponential"),
 * nodes, x_max, x_core, bias_overflow. */
AWM_API awm_status awm_simulate(const char* request_json, const awm_policy* policy, awm_run** out);
AWM_API awm_status awm_run_summary(const awm_run* run, char** json);
/* CSV sweep,gini,top1_share,top10_share,total_wealth */
AWM_API awm_status awm_run_trajectory_csv(const awm_run* run, char** csv);
/* CSV agent,wealth */
AWM_API awm_status awm_run_final_state_csv(const awm_run* run, char** csv);
AWM_API awm_status awm_run_snapshot_count(const awm_run* run, size_t* count);
AWM_API awm_status awm_run_snapshot(const awm_run* run, size_t index, int64_t* sweep, awm_distribution** out);
/* Fails with AWM_ERR_ARGUMENT when no snapshot was averaged. */
AWM_API awm_status awm_run_averaged(const awm_run* run, awm_distribution** out);
AWM_API void awm_run_free(awm_run* run);

/* request: w (array), b_inf, l_inf, t_over_n, mu_bar, delta, zeta, d, x_ref. */
AWM_API awm_status awm_tail(const char* request_json, const awm_policy* policy, char** report_json);
/* request: tail (name) with its parameters, moments as in awm_tail, grid_lo,
 * grid_hi, grid_points, floor, literal. samples_csv is a w,chi policy file. */
AWM_API awm_status awm_invert(const char* request_json, char** report_json, char** samples_csv);
/* request: tail (name) with its parameters, w0, probes, moments (array of m). */
AWM_API awm_status awm_check(const char* request_json, char** report_json);

AWM_API awm_status awm_lorenz_load_survey(const char* path, awm_lorenz** out);
AWM_API awm_status awm_lorenz_load_points(const char* path, awm_lorenz** out);
AWM_API void awm_lorenz_free(awm_lorenz* lorenz);

/* config: starts, max_evaluations, simplex_tol, seed, jobs, lambda_scan,
 * n_agents, nodes, chi_min, chi_max, zeta_min, zeta_max, lambda_min, lambda_max.
 * errors_csv is F,local_error; model_csv is the fitted model curve F,L. */
AWM_API awm_status awm_fit(const awm_lorenz* data, const char* config_json, char** result_json, char** errors_csv,
                           char** model_csv);
/* Table CSV, scatter CSV and chi = zeta reference line CSV from fit results. */
AWM_API awm_status awm_report(const char* const* result_jsons, const char* const* labels, size_t count,
                              char** table_csv, char** scatter_csv, char** line_csv);

#ifdef __cplusplus
}
#endif

#endif
