/* C interface of the navigation workbench. Every call returns an rnav_status;
 * on failure rnav_last_error() gives a message for the calling thread. */
#ifndef RNAV_H
#define RNAV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RNAV_API __declspec(dllexport)
#else
#define RNAV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  RNAV_OK = 0,
  RNAV_E_INVALID_ARGUMENT = 1,
  RNAV_E_DOMAIN = 2,
  RNAV_E_PARSE = 3,
  RNAV_E_CONFIG = 4,
  RNAV_E_HYPOTHESIS = 5,
  RNAV_E_VERIFICATION = 6,
  RNAV_E_NUMERICAL = 7,
  RNAV_E_IO = 8,
  RNAV_E_INTERNAL = 9
} rnav_status;

typedef enum {
  RNAV_WIND_ZERO = 0,
  RNAV_WIND_CONSTANT = 1,        /* W = e */
  RNAV_WIND_AFFINE = 2,          /* W = -2 k0 x + xQ + e */
  RNAV_WIND_PROJECTIVE = 3,      /* W = xQ + e + c <e, x> x */
  RNAV_WIND_SPHERE_ROTATION = 4  /* ambient rotation, Q of size dim + 1 */
} rnav_wind_kind;

typedef struct rnav_metric rnav_metric;
typedef struct rnav_expr rnav_expr;

/* Receives one report line (no trailing newline). */
typedef void (*rnav_line_fn)(const char* line, void* user);

/* Unset fields keep the scenario's own values: has_seed = 0, levels <= 0,
 * samples <= 0, tol_abs <= 0, tol_rel <= 0, csv_dir NULL or empty. */
typedef struct {
  int has_seed;
  uint64_t seed;
  int levels;
  int samples;
  double tol_abs;
  double tol_rel;
  const char* csv_dir;
} rnav_run_options;

RNAV_API const char* rnav_version(void);
RNAV_API const char* rnav_last_error(void);
RNAV_API void rnav_run_options_init(rnav_run_options* opt);

/* exit_code receives 0 pass, 1 fail, 2 config error, 3 hypothesis not met. */
RNAV_API rnav_status rnav_run_scenario(const char* path, const rnav_run_options* opt, rnav_line_fn sink, void* user,
                                       int* exit_code);
/* tol_override <= 0 keeps the built-in thresholds. */
RNAV_API rnav_status rnav_selftest(uint64_t seed, double tol_override, rnav_line_fn sink, void* user, int* exit_code);

RNAV_API rnav_status rnav_expr_parse(const char* text, rnav_expr** out);
RNAV_API void rnav_expr_free(rnav_expr* e);
RNAV_API int rnav_expr_arity(const rnav_expr* e);
/* Writes the canonical form; *needed gets the length including the NUL. */
RNAV_API rnav_status rnav_expr_print(const rnav_expr* e, char* buf, size_t cap, size_t* needed);
RNAV_API rnav_status rnav_expr_eval(const rnav_expr* e, const double* x, int n, double* out);
/* Column (1-based) of the last parse error on this thread, 0 if none. */
RNAV_API int rnav_last_error_column(void);

/* q_upper: strict upper triangle row by row (NULL for zero); e: dim entries or NULL. */
RNAV_API rnav_status rnav_metric_create(int dim, double curvature, rnav_wind_kind kind, double k0,
                                        const double* q_upper, size_t q_count, const double* e, rnav_metric** out);
RNAV_API void rnav_metric_free(rnav_metric* m);
RNAV_API int rnav_metric_dim(const rnav_metric* m);
RNAV_API rnav_status rnav_metric_F(const rnav_metric* m, const double* x, const double* y, double* out);
RNAV_API rnav_status rnav_metric_fundamental_tensor(const rnav_metric* m, const double* x, const double* y,
                                                    double* out_row_major);
RNAV_API rnav_status rnav_metric_inverse_legendre(const rnav_metric* m, const double* x, const double* xi, double* out);
RNAV_API rnav_status rnav_metric_spray(const rnav_metric* m, const double* x, const double* y, double* out);
RNAV_API rnav_status rnav_metric_s_curvature(const rnav_metric* m, const double* x, const double* y, double* out);
RNAV_API rnav_status rnav_metric_flag_curvature(const rnav_metric* m, const double* x, const double* y,
                                                const double* v, double* out);
/* Finsler gradient and Laplacian of an expression field at x. */
RNAV_API rnav_status rnav_metric_gradient(const rnav_metric* m, const rnav_expr* f, const double* x, double* out);
RNAV_API rnav_status rnav_metric_laplacian(const rnav_metric* m, const rnav_expr* f, const double* x, double* out);

#ifdef __cplusplus
}
#endif

#endif
