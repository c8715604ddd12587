#ifndef EXCLUWALL_H
#define EXCLUWALL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EXCLUWALL_BUILDING)
#    define EXW_API __declspec(dllexport)
#  else
#    define EXW_API __declspec(dllimport)
#  endif
#else
#  define EXW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum exw_status {
  EXW_OK = 0,
  EXW_ERR_NULL = 1,          /* required pointer argument was NULL */
  EXW_ERR_DOMAIN = 2,        /* parameter outside its mathematical domain */
  EXW_ERR_RANGE = 3,         /* time/label/site outside the materialized range */
  EXW_ERR_PRECONDITION = 4,  /* documented precondition violated */
  EXW_ERR_CONFIG = 5,        /* experiment config failed to parse or validate */
  EXW_ERR_BUFFER = 6,        /* caller buffer too small; required size reported */
  EXW_ERR_INTERNAL = 7
} exw_status;

/* Message of the last failing call on this thread ("" if none). */
EXW_API const char* exw_last_error(void);
EXW_API const char* exw_version(void);

/* ---- clock fields ---- */

typedef struct exw_clock exw_clock;

EXW_API exw_status exw_clock_create(uint64_t seed, double horizon, exw_clock** out);
EXW_API void exw_clock_destroy(exw_clock* clock);
/* Writes up to `cap` events of site z in [0, up_to]; *count receives the total. */
EXW_API exw_status exw_clock_site_events(exw_clock* clock, int64_t z, double up_to, double* buf,
                                         size_t cap, size_t* count);
/* *found = 0 when no event follows `after` before the horizon. */
EXW_API exw_status exw_clock_next_event(exw_clock* clock, int64_t z, double after, double* out,
                                        int* found);

/* ---- walls ---- */

typedef struct exw_wall exw_wall;

typedef enum exw_wall_mode { EXW_WALL_NONE = 0, EXW_WALL_RIGHT = 1, EXW_WALL_MIN_SITE = 2 } exw_wall_mode;

/* knots: n_knots triples (t, value, jump). Ignored for EXW_WALL_NONE. */
EXW_API exw_status exw_wall_create(exw_wall_mode mode, const double* knots, size_t n_knots,
                                   double tail_slope, double offset, double reverse_time,
                                   exw_wall** out);
/* Demo right wall (slope 2/3, then T/15 + t/2 from 0.35T). */
EXW_API exw_status exw_wall_create_demo(double T, exw_wall** out);
EXW_API void exw_wall_destroy(exw_wall* wall);
/* Càdlàg value; +inf for EXW_WALL_NONE. */
EXW_API exw_status exw_wall_eval(const exw_wall* wall, double t, double* out);

/* ---- initial conditions ---- */

typedef enum exw_ic_kind {
  EXW_IC_STEP = 0,
  EXW_IC_EXPLICIT = 1,
  EXW_IC_HALF_PERIODIC = 2,
  EXW_IC_HALF_BERNOULLI = 3,
  EXW_IC_STATIONARY = 4
} exw_ic_kind;

typedef struct exw_ic_desc {
  exw_ic_kind kind;
  int64_t offset;        /* step */
  double param;          /* d (half-periodic) or rho (Bernoulli, stationary) */
  const int64_t* sites;  /* explicit */
  size_t n_sites;
  int64_t window;        /* stationary */
} exw_ic_desc;

EXW_API exw_status exw_ic_materialize(const exw_ic_desc* desc, uint64_t seed, int64_t* out, size_t n);

/* ---- trajectories ---- */

typedef struct exw_trajectory exw_trajectory;

/* wall may be NULL (no wall). */
EXW_API exw_status exw_simulate(const int64_t* positions, size_t n, const exw_wall* wall,
                                double horizon, exw_clock* clock, exw_trajectory** out);
EXW_API void exw_trajectory_destroy(exw_trajectory* traj);
EXW_API size_t exw_trajectory_size(const exw_trajectory* traj);
EXW_API exw_status exw_trajectory_position_at(const exw_trajectory* traj, size_t label, double t,
                                              int64_t* out);
EXW_API exw_status exw_trajectory_final_positions(const exw_trajectory* traj, int64_t* out, size_t n);
EXW_API exw_status exw_trajectory_jump_times(const exw_trajectory* traj, size_t label, double* buf,
                                             size_t cap, size_t* count);
/* Columns: label,jump_index,time,new_position */
EXW_API exw_status exw_trajectory_write_csv(const exw_trajectory* traj, const char* path);

/* ---- multi-species ---- */

typedef struct exw_perm exw_perm;

EXW_API exw_status exw_perm_identity(int64_t lo, int64_t hi, exw_perm** out);
EXW_API void exw_perm_destroy(exw_perm* perm);
EXW_API exw_status exw_perm_swap(exw_perm* perm, int64_t z, int* swapped);
EXW_API exw_status exw_perm_colour_at(const exw_perm* perm, int64_t z, int64_t* out);
EXW_API exw_status exw_perm_invert(const exw_perm* perm, exw_perm** out);
EXW_API exw_status exw_perm_equal(const exw_perm* a, const exw_perm* b, int* equal);

EXW_API exw_status exw_colour_position_check(const int64_t* seq, size_t len, int* holds);
/* Adjacent swap sites of pi for the initial positions u (n >= 2). *pi_id may be NULL. */
EXW_API exw_status exw_build_pi(const int64_t* u, size_t n, int64_t* swaps, size_t cap,
                                size_t* count, exw_perm** pi_id);

typedef enum exw_exchange_outcome { EXW_EXCHANGE_HOLDS = 0, EXW_EXCHANGE_FAILS = 1, EXW_EXCHANGE_NOT_MET = 2 } exw_exchange_outcome;

/* occupied[k] (0/1) describes site a + k, k = 0..b-a. */
EXW_API exw_status exw_exchange_check(const int* occupied, size_t len, int64_t a, int64_t b,
                                     int64_t x, exw_exchange_outcome* out);

/* ---- experiments ---- */

typedef struct exw_run_options {
  uint64_t seed;
  int has_seed;               /* 0: use the config's seed (or 0) */
  uint64_t samples;           /* 0: use the config's value */
  unsigned replicas_in_flight;
} exw_run_options;

typedef struct exw_result exw_result;

/* Runs the experiment described by a JSON config. EXW_ERR_CONFIG for schema
 * violations. A completed run that failed its verification still returns
 * EXW_OK; query exw_result_verified. */
EXW_API exw_status exw_run_experiment(const char* config_json, const exw_run_options* opts,
                                      exw_result** out);
/* The TRIVIAL-case suite. */
EXW_API exw_status exw_selfcheck(exw_result** out);
EXW_API void exw_result_destroy(exw_result* result);
EXW_API int exw_result_verified(const exw_result* result);
EXW_API const char* exw_result_report(const exw_result* result);
EXW_API size_t exw_result_artifact_count(const exw_result* result);
EXW_API const char* exw_result_artifact_name(const exw_result* result, size_t i);
EXW_API const char* exw_result_artifact_data(const exw_result* result, size_t i, size_t* len);

/* Help text listing config keys and CSV columns of an experiment, or NULL. */
EXW_API const char* exw_experiment_help(const char* experiment);

#ifdef __cplusplus
}
#endif

#endif
