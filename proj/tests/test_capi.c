/* Exercises the C interface from C. */
#include "solenoid/solenoid.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                                                                   \
  do {                                                                                                                 \
    if (!(cond)) {                                                                                                     \
      fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, __LINE__, #cond, sol_last_error());         \
      ++failures;                                                                                                      \
    }                                                                                                                  \
  } while (0)

static void test_kronecker(void)
{
  const double a = sqrt(2.0) - 1.0, b = sqrt(3.0) - 1.0;
  const double det = (b - a) / sqrt((1 + a * a) * (1 + b * b));
  sol_model *m1 = NULL, *m2 = NULL;
  EXPECT(sol_model_kronecker(a, 8, 0.0, &m1) == SOL_OK);
  EXPECT(sol_model_kronecker(b, 8, 0.0, &m2) == SOL_OK);
  int n = 0, k = 0;
  EXPECT(sol_model_dims(m1, &n, &k) == SOL_OK && n == 2 && k == 1);

  double exact = 0, cup = 0, ae = 0, bound = -1;
  EXPECT(sol_pairing_exact(m1, m2, 8, &exact) == SOL_OK);
  EXPECT(sol_pairing_via_cup(m1, m2, 64, &cup) == SOL_OK);
  EXPECT(fabs(exact - det) < 1e-4);
  EXPECT(fabs(cup - det) < 1e-6);
  EXPECT(sol_ae_pairing(m1, m2, 6, 1e-3, -1, &ae, &bound) == SOL_OK);
  EXPECT(bound == 0.0);

  double radii[2] = {100.0, 1000.0}, est[2];
  EXPECT(sol_exhaustion(m1, m2, radii, 2, est) == SOL_OK);
  EXPECT(fabs(est[1] - det) < 1e-2);

  double cls[2];
  size_t count = 0;
  EXPECT(sol_rs_class(m1, 64, cls, 2, &count) == SOL_OK && count == 2);
  EXPECT(fabs(cls[1] / cls[0] - a) < 1e-12);
  EXPECT(sol_rs_class(m1, 64, cls, 1, &count) == SOL_ERR_BUFFER && count == 2);

  sol_form* w = NULL;
  const int idx[1] = {0};
  const int freq[2] = {0, 0};
  EXPECT(sol_form_new(2, 1, &w) == SOL_OK);
  EXPECT(sol_form_add(w, idx, freq, 1.0, 0.0) == SOL_OK);
  double v = 0;
  EXPECT(sol_evaluate_current(m1, w, 64, &v) == SOL_OK);
  EXPECT(fabs(v - cls[0]) < 1e-14);
  double res = 1;
  EXPECT(sol_evaluate_current(m1, NULL, 64, &v) == SOL_ERR_NULL);
  sol_form_free(w);

  sol_form* f = NULL;
  const int f2[2] = {1, 2};
  EXPECT(sol_form_new(2, 0, &f) == SOL_OK);
  EXPECT(sol_form_add(f, NULL, f2, 0.3, -0.7) == SOL_OK);
  EXPECT(sol_stokes_residual(m1, f, 64, &res) == SOL_OK && res < 1e-8);
  sol_form_free(f);

  sol_model_free(m1);
  sol_model_free(m2);
}

static void test_fat_refusal(void)
{
  sol_cantor_spec spec;
  sol_cantor_spec_default(&spec);
  spec.construction = SOL_FAT;
  spec.gap_base = 4.0;
  spec.gap_scale = 0.8;
  spec.depth = 8;
  spec.measure = SOL_LEBESGUE;
  sol_model *h = NULL, *g = NULL;
  EXPECT(sol_model_horizontal_circles(&spec, &h) == SOL_OK);
  EXPECT(sol_model_graph_cosine(0.05, 0.0, 0.0, 1.0, &spec, &g) == SOL_OK);
  double bounds[9];
  int interval = 0;
  EXPECT(sol_mass_bound(h, g, 6, 8, bounds, &interval) == SOL_OK);
  EXPECT(bounds[8] > 0.1);
  double value = 0, bound = 0;
  EXPECT(sol_ae_pairing(h, g, 6, 1e-3, 8, &value, &bound) == SOL_ERR_REFUSED);
  EXPECT(strlen(sol_last_error()) > 0);
  sol_model_free(h);
  sol_model_free(g);
}

static void test_errors(void)
{
  sol_cantor_spec spec;
  sol_cantor_spec_default(&spec);
  spec.ratio = 1.5;
  sol_model* m = NULL;
  EXPECT(sol_model_horizontal_circles(&spec, &m) == SOL_ERR_CONSTRUCTION);
  EXPECT(m == NULL);
  EXPECT(sol_model_kronecker(0.3, 4, 0.0, NULL) == SOL_ERR_NULL);
  sol_form* w = NULL;
  EXPECT(sol_form_new(2, 3, &w) != SOL_OK);
  EXPECT(sol_version() != NULL && strlen(sol_version()) > 0);
}

static void test_perturb(void)
{
  sol_cantor_spec spec;
  sol_cantor_spec_default(&spec);
  spec.ratio = 0.6;
  spec.depth = 8;
  sol_model *g = NULL, *out = NULL;
  EXPECT(sol_model_graph_cosine(0.05, 0.0, 0.0, 1.0, &spec, &g) == SOL_OK);
  const int fixed[1] = {1};
  const double values[1] = {0.19226752};
  double margin = 0, drift = 1;
  EXPECT(sol_perturb(g, 2, 1, fixed, values, 0.01, 1, &out, &margin, &drift) == SOL_OK);
  EXPECT(margin >= 1e-3);
  EXPECT(drift <= 1e-6);
  sol_model_free(out);
  sol_model_free(g);
}

static void test_scenarios(const char* dir)
{
  char path[1024];
  sol_overrides ov;
  sol_overrides_default(&ov);
  ov.out_dir = "capi-out";
  int code = -1;
  snprintf(path, sizeof path, "%s/kronecker-pairing.json", dir);
  EXPECT(sol_run_scenario(path, &ov, &code) == SOL_OK && code == 0);
  snprintf(path, sizeof path, "%s/perturb-solenoids.json", dir);
  EXPECT(sol_run_scenario(path, &ov, &code) == SOL_OK && code == 2);
  EXPECT(strlen(sol_last_error()) > 0);

  size_t needed = 0;
  snprintf(path, sizeof path, "%s/odometer-biased.json", dir);
  EXPECT(sol_validate_scenario(path, NULL, NULL, 0, &needed) == SOL_ERR_BUFFER);
  char* buf = malloc(needed);
  EXPECT(sol_validate_scenario(path, NULL, buf, needed, &needed) == SOL_OK);
  EXPECT(strstr(buf, "FAIL model0.holonomy_invariance") != NULL);
  free(buf);
}

int main(int argc, char** argv)
{
  test_kronecker();
  test_fat_refusal();
  test_errors();
  test_perturb();
  if (argc > 1)
    test_scenarios(argv[1]);
  if (failures)
    fprintf(stderr, "%d C API check(s) failed\n", failures);
  else
    printf("C API checks passed\n");
  return failures ? 1 : 0;
}
