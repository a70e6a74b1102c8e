#include <math.h>
#include <stdio.h>
#include <string.h>

#include "conical_harvest.h"

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      fprintf(stderr, "line %d: %s\n", __LINE__, #cond);                   \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  CHECK(strcmp(ch_version(), "0.1.0") == 0);

  double p0 = ch_p_flat(0.1);
  CHECK(fabs(p0 - 0.06626718302937379) < 1e-15);

  double p = 0.0;
  CHECK(ch_p_string(0.0, 3.0, 0.1, &p) == CH_STATUS_OK);
  CHECK(fabs(p - 3.0 * p0) < 1e-12);

  ChPair *pair = NULL;
  CHECK(ch_pair_new(CH_ALIGNMENT_PARALLEL, 3.0, 0.1, 0.5, 0.1, &pair) == CH_STATUS_OK);
  ChConcurrence c;
  CHECK(ch_pair_concurrence(pair, &c) == CH_STATUS_OK);
  CHECK(c.concurrence > 0.0 && c.abs_x > c.p_a);
  ch_pair_free(pair);

  pair = NULL;
  CHECK(ch_pair_new(CH_ALIGNMENT_OPPOSITE, 4.0, 1.0, 2.0, 0.1, &pair) == CH_STATUS_OK);
  CHECK(ch_pair_concurrence(pair, &c) == CH_STATUS_DIVERGENT_OVERLAP);
  CHECK(strstr(ch_last_error(), "divergent_overlap") != NULL);
  ch_pair_free(pair);

  CHECK(ch_pair_new(CH_ALIGNMENT_OPPOSITE, 3.0, 1.0, 1.5, 0.1, &pair) == CH_STATUS_INVALID_PARAMETER);

  ChSweep *sweep = NULL;
  CHECK(ch_sweep_new(CH_ALIGNMENT_FLAT, CH_AXIS_D, 0.1, 1.0, 10, 1.0, 0.0, 0.5, 0.1, &sweep) == CH_STATUS_OK);
  CHECK(ch_sweep_len(sweep) == 10);
  ChSweepRow row;
  CHECK(ch_sweep_row(sweep, 9, &row) == CH_STATUS_OK);
  CHECK(row.computed == 1 && row.param == 1.0);
  CHECK(ch_sweep_row(sweep, 10, &row) == CH_STATUS_OUT_OF_RANGE);
  ch_sweep_free(sweep);

  printf("ok\n");
  return 0;
}
