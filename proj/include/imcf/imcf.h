#ifndef IMCF_IMCF_H
#define IMCF_IMCF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define IMCF_API __attribute__((visibility("default")))
#else
#define IMCF_API
#endif

/* Return codes. Every function returns one of these; outputs are written only on IMCF_OK. */
enum {
  IMCF_OK = 0,
  IMCF_E_DOMAIN = 1,
  IMCF_E_NON_POSITIVE_WARPING = 2,
  IMCF_E_INCONSISTENCY = 3,
  IMCF_E_STEP_TOO_LARGE = 4,
  IMCF_E_DEGENERATE_POTENTIAL = 5,
  IMCF_E_CFL_VIOLATION = 6,
  IMCF_E_NON_MEAN_CONVEX = 7,
  IMCF_E_STAR_SHAPE_LOST = 8,
  IMCF_E_UNKNOWN_SCENARIO = 9,
  IMCF_E_PARAM_OUT_OF_RANGE = 10,
  IMCF_E_PARSE = 11,
  IMCF_E_VALIDATION = 12,
  IMCF_E_IO = 13,
  IMCF_E_INVALID_ARGUMENT = 14,
  IMCF_E_INTERNAL = 15
};

enum { IMCF_CERT_LTE = 0, IMCF_CERT_ASYMPTOTICS = 1 };
enum { IMCF_VERDICT_PASS = 0, IMCF_VERDICT_FAIL = 1, IMCF_VERDICT_SKIPPED = 2 };

typedef struct imcf_config imcf_config;
typedef struct imcf_scenario imcf_scenario;
typedef struct imcf_certificate imcf_certificate;
typedef struct imcf_trajectory imcf_trajectory;
typedef struct imcf_monitors imcf_monitors;

IMCF_API const char* imcf_version(void);
IMCF_API const char* imcf_error_name(int code);
/* Message of the last failed call on this thread; empty after a successful call. */
IMCF_API const char* imcf_last_error(void);

/* Configuration: strict key = value text. */
IMCF_API int imcf_config_parse(const char* text, imcf_config** out);
IMCF_API int imcf_config_load(const char* path, imcf_config** out);
IMCF_API int imcf_config_set_subcommand(imcf_config* config, const char* name);
IMCF_API int imcf_config_set_seed(imcf_config* config, uint64_t seed);
IMCF_API int imcf_config_set_out(imcf_config* config, const char* dir);
/* Copies the canonical text into buf (NUL terminated) when it fits; *needed excludes the NUL. */
IMCF_API int imcf_config_serialize(const imcf_config* config, char* buf, size_t capacity, size_t* needed);
IMCF_API void imcf_config_free(imcf_config* config);

/* Runs the configured subcommand. base_dir resolves relative scenario files; out_dir may be
   NULL to use the config, then IMCF_LAB_OUT, then "imcf_out". Progress lines go to stderr when
   verbose is nonzero. *exit_status follows the CLI contract (0 pass, 1 fail, 2 usage). */
IMCF_API int imcf_execute(const imcf_config* config, const char* base_dir, const char* out_dir, int verbose,
                          int* exit_status);

/* Scenarios: catalogue id plus optional "key = value" parameter text (may be NULL). */
IMCF_API int imcf_scenario_create(const char* id, const char* params, imcf_scenario** out);
IMCF_API int imcf_scenario_load(const char* path, imcf_scenario** out);
IMCF_API int imcf_scenario_dimension(const imcf_scenario* scenario, int* n);
IMCF_API void imcf_scenario_free(imcf_scenario* scenario);

/* Curvature at (r, angles[0..n-1]) of the conformal metric; vectors are coordinate components. */
IMCF_API int imcf_hat_ricci(const imcf_scenario* scenario, double r, const double* angles, const double* x,
                            const double* y, double* out);
IMCF_API int imcf_hat_scalar(const imcf_scenario* scenario, double r, const double* angles, double* out);

IMCF_API int imcf_certify(const imcf_scenario* scenario, int kind, uint64_t seed, int threads,
                          imcf_certificate** out);
IMCF_API int imcf_certificate_pass(const imcf_certificate* cert, int* pass);
IMCF_API int imcf_certificate_margin(const imcf_certificate* cert, const char* condition, double* margin);
IMCF_API int imcf_certificate_fitted(const imcf_certificate* cert, const char* key, double* value);
IMCF_API void imcf_certificate_free(imcf_certificate* cert);

/* mode is "rot_sym", "axisym" or "full_s2"; steps = 0 selects the adaptive step. */
IMCF_API int imcf_flow_run(const imcf_scenario* scenario, const char* mode, int resolution, double T, int steps,
                           int threads, imcf_trajectory** out);
IMCF_API int imcf_trajectory_size(const imcf_trajectory* traj, size_t* count);
/* Ten values in CSV column order: t, w_min, w_max, eta_min, eta_max, H_min, H_max, u_max, v_max, k_max. */
IMCF_API int imcf_trajectory_record(const imcf_trajectory* traj, size_t index, double* values);
/* *code is IMCF_OK when the run reached T, else the halting error and its time. */
IMCF_API int imcf_trajectory_halt(const imcf_trajectory* traj, int* code, double* t);
IMCF_API void imcf_trajectory_free(imcf_trajectory* traj);

IMCF_API int imcf_monitors_evaluate(const imcf_trajectory* traj, const imcf_scenario* scenario,
                                    const imcf_certificate* lte, const imcf_certificate* asymptotics,
                                    imcf_monitors** out);
IMCF_API int imcf_monitors_pass(const imcf_monitors* report, int* pass);
IMCF_API int imcf_monitors_check(const imcf_monitors* report, const char* id, int* verdict, double* margin,
                                 double* t_worst);
IMCF_API void imcf_monitors_free(imcf_monitors* report);

#ifdef __cplusplus
}
#endif

#endif
