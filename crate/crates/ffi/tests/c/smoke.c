#include <math.h>
#include <stdio.h>
#include <string.h>

#include "gaugeforge.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,   \
              gf_last_error());                                        \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  GfExpr *l = NULL;
  GfExpr *residual = NULL;
  CHECK(gf_expr_parse("0.5*(v^2 - 4*x^2)", &l) == GF_STATUS_OK);
  CHECK(gf_euler_lagrange(l, &residual) == GF_STATUS_OK);

  char *text = gf_expr_to_string(residual);
  CHECK(text != NULL && strcmp(text, "4*x + a") == 0);
  gf_string_free(text);

  bool overall = false;
  CHECK(gf_helmholtz_check(residual, 1000, 1e-9, 1, &overall, NULL, NULL) == GF_STATUS_OK);
  CHECK(overall);

  GfExpr *bad = NULL;
  CHECK(gf_expr_parse("2*", &bad) == GF_STATUS_SYNTAX);
  CHECK(strlen(gf_last_error()) > 0);

  GfSimConfig cfg = {4.0, 1.0, 0.0, 0.0, 10.0, 1e-3};
  GfTrajectory *traj = NULL;
  CHECK(gf_simulate(&cfg, NULL, NULL, &traj) == GF_STATUS_OK);
  const double *t = NULL;
  const double *x = NULL;
  size_t n = 0;
  CHECK(gf_trajectory_column(traj, GF_COLUMN_TIME, &t, &n) == GF_STATUS_OK);
  CHECK(gf_trajectory_column(traj, GF_COLUMN_POSITION, &x, &n) == GF_STATUS_OK);
  CHECK(n == 10001);
  double err = 0.0;
  for (size_t i = 0; i < n; i++) {
    double d = fabs(x[i] - cos(2.0 * t[i]));
    if (d > err) err = d;
  }
  CHECK(err <= 1e-6);

  gf_trajectory_free(traj);
  gf_expr_free(residual);
  gf_expr_free(l);
  printf("ok\n");
  return 0;
}
