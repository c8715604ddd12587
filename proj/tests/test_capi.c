#include <math.h>
#include <stdio.h>
#include <string.h>

#include "excluwall/excluwall.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: EXPECT(%s)\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_clock(void) {
  exw_clock* c = NULL;
  EXPECT(exw_clock_create(7, 5.0, &c) == EXW_OK);
  size_t count = 0;
  double buf[64];
  EXPECT(exw_clock_site_events(c, 0, 5.0, buf, 64, &count) == EXW_OK);
  for (size_t i = 1; i < count && i < 64; ++i) EXPECT(buf[i] > buf[i - 1]);
  if (count > 0) {
    size_t small = 0;
    EXPECT(exw_clock_site_events(c, 0, 5.0, buf, 0, &small) == EXW_ERR_BUFFER);
    EXPECT(small == count);
    double next = 0.0;
    int found = 0;
    EXPECT(exw_clock_next_event(c, 0, 0.0, &next, &found) == EXW_OK);
    EXPECT(found == 1 && next == buf[0]);
  }
  EXPECT(exw_clock_site_events(c, 0, 6.0, buf, 64, &count) == EXW_ERR_RANGE);
  EXPECT(strlen(exw_last_error()) > 0);
  exw_clock_destroy(c);
  EXPECT(exw_clock_create(1, 1.0, NULL) == EXW_ERR_NULL);
}

static void test_wall_and_simulate(void) {
  const double knots[] = {0.0, 0.0, 0.0, 1.0, 1.5, 0.0};
  exw_wall* w = NULL;
  EXPECT(exw_wall_create(EXW_WALL_RIGHT, knots, 2, 0.5, 0.0, 0.0, &w) == EXW_OK);
  double v = 0.0;
  EXPECT(exw_wall_eval(w, 2.0, &v) == EXW_OK && fabs(v - 2.0) < 1e-12);
  EXPECT(exw_wall_eval(w, -1.0, &v) == EXW_ERR_DOMAIN);
  const double bad[] = {0.0, 0.0, 0.0, 1.0, -1.0, 0.0};
  exw_wall* w2 = NULL;
  EXPECT(exw_wall_create(EXW_WALL_RIGHT, bad, 2, 0.0, 0.0, 0.0, &w2) == EXW_ERR_PRECONDITION);

  exw_ic_desc desc;
  memset(&desc, 0, sizeof desc);
  desc.kind = EXW_IC_HALF_PERIODIC;
  desc.param = 2.0;
  int64_t u[3];
  EXPECT(exw_ic_materialize(&desc, 0, u, 3) == EXW_OK);
  EXPECT(u[0] == 0 && u[1] == -2 && u[2] == -4);
  desc.param = 0.5;
  EXPECT(exw_ic_materialize(&desc, 0, u, 3) == EXW_ERR_DOMAIN);

  exw_clock* c = NULL;
  exw_clock_create(3, 4.0, &c);
  const int64_t step[3] = {0, -1, -2};
  exw_trajectory* t = NULL;
  EXPECT(exw_simulate(step, 3, w, 4.0, c, &t) == EXW_OK);
  EXPECT(exw_trajectory_size(t) == 3);
  int64_t fin[3];
  EXPECT(exw_trajectory_final_positions(t, fin, 3) == EXW_OK);
  EXPECT(fin[0] > fin[1] && fin[1] > fin[2]);
  EXPECT((double)fin[0] <= 0.5 * 4.0);
  int64_t x = 0;
  EXPECT(exw_trajectory_position_at(t, 1, 0.0, &x) == EXW_OK && x == 0);
  EXPECT(exw_trajectory_position_at(t, 4, 0.0, &x) == EXW_ERR_RANGE);
  EXPECT(exw_trajectory_position_at(t, 1, 5.0, &x) == EXW_ERR_RANGE);
  size_t jumps = 0;
  EXPECT(exw_trajectory_jump_times(t, 1, NULL, 0, &jumps) == (fin[0] == 0 ? EXW_OK : EXW_ERR_BUFFER));
  EXPECT((int64_t)jumps == fin[0]);
  exw_trajectory_destroy(t);
  exw_clock_destroy(c);
  exw_wall_destroy(w);
}

static void test_perm(void) {
  exw_perm* p = NULL;
  EXPECT(exw_perm_identity(-3, 3, &p) == EXW_OK);
  int swapped = 0;
  EXPECT(exw_perm_swap(p, 0, &swapped) == EXW_OK && swapped == 1);
  EXPECT(exw_perm_swap(p, 0, &swapped) == EXW_OK && swapped == 0);
  int64_t col = 0;
  EXPECT(exw_perm_colour_at(p, 1, &col) == EXW_OK && col == 0);
  exw_perm* inv = NULL;
  EXPECT(exw_perm_invert(p, &inv) == EXW_OK);
  int eq = 0;
  EXPECT(exw_perm_equal(p, inv, &eq) == EXW_OK && eq == 1);
  const int64_t seq[] = {0, 1, 0, -1, 1};
  int holds = 0;
  EXPECT(exw_colour_position_check(seq, 5, &holds) == EXW_OK && holds == 1);
  const int64_t u[] = {0, -2};
  int64_t swaps[8];
  size_t n = 0;
  EXPECT(exw_build_pi(u, 2, swaps, 8, &n, NULL) == EXW_OK);
  EXPECT(n == 1 && swaps[0] == -1);
  const int occ[] = {1, 0, 1, 0};
  exw_exchange_outcome o;
  EXPECT(exw_exchange_check(occ, 4, 0, 3, 1, &o) == EXW_OK && o == EXW_EXCHANGE_HOLDS);
  exw_perm_destroy(inv);
  exw_perm_destroy(p);
}

static void test_run(void) {
  exw_result* r = NULL;
  exw_run_options opt = {0, 0, 0, 2};
  EXPECT(exw_run_experiment("{\"experiment\":\"classify\",\"d\":1,\"alpha\":0.1}", &opt, &r) == EXW_OK);
  EXPECT(exw_result_verified(r) == 1);
  EXPECT(strstr(exw_result_report(r), "GOE x GOE") != NULL);
  EXPECT(exw_result_artifact_count(r) == 1);
  size_t len = 0;
  EXPECT(exw_result_artifact_data(r, 0, &len) != NULL && len > 0);
  EXPECT(exw_result_artifact_name(r, 5) == NULL);
  exw_result_destroy(r);
  EXPECT(exw_run_experiment("{\"experiment\":\"classify\",\"zzz\":1}", &opt, &r) == EXW_ERR_CONFIG);
  EXPECT(strstr(exw_last_error(), "zzz") != NULL);
  EXPECT(exw_run_experiment("{not json", &opt, &r) == EXW_ERR_CONFIG);
  EXPECT(exw_run_experiment(NULL, &opt, &r) == EXW_ERR_NULL);
  EXPECT(exw_selfcheck(&r) == EXW_OK);
  EXPECT(exw_result_verified(r) == 1);
  exw_result_destroy(r);
  EXPECT(exw_experiment_help("density") != NULL);
  EXPECT(exw_experiment_help("nothing") == NULL);
  EXPECT(strcmp(exw_version(), "1.0.0") == 0);
}

int main(void) {
  test_clock();
  test_wall_and_simulate();
  test_perm();
  test_run();
  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
