/* C interface to libsolenoid.  All handles are opaque; every call returns a
 * sol_status and, on failure, leaves a message for sol_last_error(). */
#ifndef SOLENOID_H
#define SOLENOID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOL_API __declspec(dllexport)
#else
#define SOL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sol_status {
  SOL_OK = 0,
  SOL_ERR_INPUT = 1,
  SOL_ERR_REFUSED = 2,
  SOL_ERR_CONSTRUCTION = 3,
  SOL_ERR_ADDRESS = 4,
  SOL_ERR_DEGREE = 5,
  SOL_ERR_IMMERSION = 6,
  SOL_ERR_NULL = 7,
  SOL_ERR_BUFFER = 8,
  SOL_ERR_INTERNAL = 9
} sol_status;

typedef struct sol_model sol_model;
typedef struct sol_form sol_form;

typedef enum sol_construction { SOL_MIDDLE_RATIO = 0, SOL_INTERVAL = 1, SOL_FAT = 2 } sol_construction;
typedef enum sol_measure { SOL_BERNOULLI = 0, SOL_LEBESGUE = 1 } sol_measure;
typedef enum sol_return_map { SOL_IDENTITY = 0, SOL_ODOMETER = 1 } sol_return_map;

typedef struct sol_cantor_spec {
  sol_construction construction;
  double ratio;     /* removed middle fraction (middle ratio) */
  double gap_base;  /* fat: gap at level d is gap_scale * gap_base^-d */
  double gap_scale;
  int depth;
  sol_measure measure;
  double p;
  double total_mass;
} sol_cantor_spec;

typedef struct sol_overrides {
  int depth;      /* < 0: keep the scenario value */
  int quad_order; /* < 0: keep */
  int has_seed;
  uint64_t seed;
  const char* out_dir; /* NULL: keep */
} sol_overrides;

SOL_API const char* sol_version(void);
/* Message of the last failed call (or the last scenario diagnostic) on this thread. */
SOL_API const char* sol_last_error(void);

SOL_API void sol_cantor_spec_default(sol_cantor_spec* spec);
SOL_API void sol_overrides_default(sol_overrides* ov);

/* Models */
SOL_API sol_status sol_model_kronecker(double slope, int depth, double x_offset, sol_model** out);
SOL_API sol_status sol_model_horizontal_circles(const sol_cantor_spec* k, sol_model** out);
SOL_API sol_status sol_model_vertical_circle(double c, sol_model** out);
SOL_API sol_status sol_model_suspension(sol_return_map h, double transition_start, const sol_cantor_spec* k,
                                        sol_model** out);
/* Leaves x -> (x, base + a (1 - cos 2 pi x) + y) over [x_min, x_max]. */
SOL_API sol_status sol_model_graph_cosine(double amplitude, double base, double x_min, double x_max,
                                          const sol_cantor_spec* k, sol_model** out);
/* directions: n x k, column-major.  periods may be NULL. plane != 0 selects R^n. */
SOL_API sol_status sol_model_linear(int plane, int n, int k, const double* directions, const double* transversal_dir,
                                    const double* offset, const double* periods, const sol_cantor_spec* spec,
                                    sol_model** out);
SOL_API sol_status sol_model_subtorus(int n, int q, const int* fixed, const double* values, sol_model** out);
SOL_API sol_status sol_model_dims(const sol_model* m, int* n, int* k);
SOL_API void sol_model_free(sol_model* m);

/* Forms */
SOL_API sol_status sol_form_new(int n, int k, sol_form** out);
/* Adds coefficient (a cos 2 pi f.x + b sin 2 pi f.x) dx_index; index has k entries, freq has n. */
SOL_API sol_status sol_form_add(sol_form* w, const int* index, const int* freq, double a, double b);
SOL_API void sol_form_free(sol_form* w);

/* Currents */
SOL_API sol_status sol_evaluate_current(const sol_model* m, const sol_form* w, int quad_order, double* value);
/* Coefficients in the lexicographic basis dx_I; *count receives C(n, k). */
SOL_API sol_status sol_rs_class(const sol_model* m, int quad_order, double* coeffs, size_t capacity, size_t* count);
SOL_API sol_status sol_stokes_residual(const sol_model* m, const sol_form* beta, int quad_order, double* residual);

/* Intersections */
SOL_API sol_status sol_pairing_exact(const sol_model* m1, const sol_model* m2, int depth, double* value);
SOL_API sol_status sol_pairing_via_cup(const sol_model* m1, const sol_model* m2, int quad_order, double* value);
SOL_API sol_status sol_exhaustion(const sol_model* m1, const sol_model* m2, const double* radii, size_t count,
                                  double* estimates);
SOL_API sol_status sol_mass_bound(const sol_model* m1, const sol_model* m2, int depth, int bound_depth, double* bounds,
                                  int* interval_bound);
SOL_API sol_status sol_ae_pairing(const sol_model* m1, const sol_model* m2, int depth, double tolerance,
                                  int null_depth, double* value, double* error_bound);
SOL_API sol_status sol_perturb(const sol_model* m, int n, int q, const int* fixed, const double* values, double epsilon,
                               uint64_t seed, sol_model** out, double* min_margin, double* class_drift);

/* Scenarios.  exit_code follows the CLI: 0 ok, 1 input error, 2 refusal. */
SOL_API sol_status sol_run_scenario(const char* path, const sol_overrides* ov, int* exit_code);
/* Writes the validation report; *needed receives its length including the terminator. */
SOL_API sol_status sol_validate_scenario(const char* path, const sol_overrides* ov, char* buffer, size_t capacity,
                                         size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
