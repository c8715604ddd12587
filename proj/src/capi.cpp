#include "excluwall/excluwall.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "excluwall/experiments.hpp"

using namespace excluwall;

struct exw_clock {
  ClockField field;
};

struct exw_wall {
  WallSpec spec;
};

struct exw_trajectory {
  Trajectory traj;
};

struct exw_perm {
  PermutationConfig cfg;
};

struct exw_result {
  RunResult result;
  std::string report;
};

namespace {

thread_local std::string last_error;

exw_status fail(exw_status code, const char* what) {
  last_error = what;
  return code;
}

template <class F>
exw_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ConfigError& e) {
    return fail(EXW_ERR_CONFIG, e.what());
  } catch (const DomainError& e) {
    return fail(EXW_ERR_DOMAIN, e.what());
  } catch (const RangeError& e) {
    return fail(EXW_ERR_RANGE, e.what());
  } catch (const PreconditionError& e) {
    return fail(EXW_ERR_PRECONDITION, e.what());
  } catch (const json::exception& e) {
    return fail(EXW_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EXW_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EXW_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EXW_ERR_INTERNAL, "unknown error");
  }
}

#define EXW_REQUIRE(p) \
  if ((p) == nullptr) return fail(EXW_ERR_NULL, #p " is NULL")

}  // namespace

extern "C" {

const char* exw_last_error(void) { return last_error.c_str(); }
const char* exw_version(void) { return "1.0.0"; }

exw_status exw_clock_create(uint64_t seed, double horizon, exw_clock** out) {
  EXW_REQUIRE(out);
  return guarded([&] {
    if (!(horizon >= 0.0)) throw DomainError("horizon must be >= 0");
    *out = new exw_clock{ClockField(seed, horizon)};
    return EXW_OK;
  });
}

void exw_clock_destroy(exw_clock* clock) { delete clock; }

exw_status exw_clock_site_events(exw_clock* clock, int64_t z, double up_to, double* buf, size_t cap,
                                 size_t* count) {
  EXW_REQUIRE(clock);
  EXW_REQUIRE(count);
  return guarded([&] {
    const auto ev = clock->field.site_events(z, up_to);
    *count = ev.size();
    if (ev.size() > cap) return fail(EXW_ERR_BUFFER, "buffer too small");
    if (!ev.empty()) {
      if (buf == nullptr) return fail(EXW_ERR_NULL, "buf is NULL");
      std::memcpy(buf, ev.data(), ev.size() * sizeof(double));
    }
    return EXW_OK;
  });
}

exw_status exw_clock_next_event(exw_clock* clock, int64_t z, double after, double* out, int* found) {
  EXW_REQUIRE(clock);
  EXW_REQUIRE(out);
  EXW_REQUIRE(found);
  return guarded([&] {
    const auto t = clock->field.next_event(z, after);
    *found = t ? 1 : 0;
    *out = t ? *t : 0.0;
    return EXW_OK;
  });
}

exw_status exw_wall_create(exw_wall_mode mode, const double* knots, size_t n_knots, double tail_slope,
                           double offset, double reverse_time, exw_wall** out) {
  EXW_REQUIRE(out);
  return guarded([&] {
    if (mode == EXW_WALL_NONE) {
      *out = new exw_wall{WallSpec::none()};
      return EXW_OK;
    }
    if (n_knots > 0 && knots == nullptr) return fail(EXW_ERR_NULL, "knots is NULL");
    std::vector<Breakpoint> bp(n_knots);
    for (size_t k = 0; k < n_knots; ++k) bp[k] = {knots[3 * k], knots[3 * k + 1], knots[3 * k + 2]};
    PiecewiseFn f = n_knots == 0 ? PiecewiseFn{} : PiecewiseFn::from_breakpoints(std::move(bp), tail_slope);
    if (mode == EXW_WALL_RIGHT) {
      *out = new exw_wall{WallSpec::right_wall(std::move(f))};
    } else if (mode == EXW_WALL_MIN_SITE) {
      *out = new exw_wall{WallSpec::min_site(std::move(f), offset, reverse_time)};
    } else {
      return fail(EXW_ERR_DOMAIN, "unknown wall mode");
    }
    return EXW_OK;
  });
}

exw_status exw_wall_create_demo(double T, exw_wall** out) {
  EXW_REQUIRE(out);
  return guarded([&] {
    *out = new exw_wall{WallSpec::right_wall(PiecewiseFn::demo_wall(T))};
    return EXW_OK;
  });
}

void exw_wall_destroy(exw_wall* wall) { delete wall; }

exw_status exw_wall_eval(const exw_wall* wall, double t, double* out) {
  EXW_REQUIRE(wall);
  EXW_REQUIRE(out);
  return guarded([&] {
    *out = eval_wall(wall->spec, t);
    return EXW_OK;
  });
}

exw_status exw_ic_materialize(const exw_ic_desc* desc, uint64_t seed, int64_t* out, size_t n) {
  EXW_REQUIRE(desc);
  EXW_REQUIRE(out);
  return guarded([&] {
    if (n == 0) throw PreconditionError("n must be >= 1");
    InitialConditionSpec spec;
    spec.n_max = n;
    switch (desc->kind) {
      case EXW_IC_STEP:
        spec.kind = StepIC{desc->offset};
        break;
      case EXW_IC_EXPLICIT:
        if (desc->sites == nullptr) return fail(EXW_ERR_NULL, "sites is NULL");
        spec.kind = ExplicitIC{std::vector<Site>(desc->sites, desc->sites + desc->n_sites)};
        break;
      case EXW_IC_HALF_PERIODIC:
        spec.kind = HalfPeriodicIC{desc->param};
        break;
      case EXW_IC_HALF_BERNOULLI:
        spec.kind = HalfBernoulliIC{desc->param};
        break;
      case EXW_IC_STATIONARY:
        spec.kind = StationaryIC{desc->param, desc->window};
        break;
      default:
        return fail(EXW_ERR_DOMAIN, "unknown initial condition kind");
    }
    const auto u = materialize_ic(spec, seed);
    std::memcpy(out, u.data(), n * sizeof(int64_t));
    return EXW_OK;
  });
}

exw_status exw_simulate(const int64_t* positions, size_t n, const exw_wall* wall, double horizon,
                        exw_clock* clock, exw_trajectory** out) {
  EXW_REQUIRE(positions);
  EXW_REQUIRE(clock);
  EXW_REQUIRE(out);
  return guarded([&] {
    const WallSpec spec = wall ? wall->spec : WallSpec::none();
    *out = new exw_trajectory{simulate(std::span<const Site>(positions, n), spec, horizon, clock->field)};
    return EXW_OK;
  });
}

void exw_trajectory_destroy(exw_trajectory* traj) { delete traj; }

size_t exw_trajectory_size(const exw_trajectory* traj) { return traj ? traj->traj.size() : 0; }

exw_status exw_trajectory_position_at(const exw_trajectory* traj, size_t label, double t, int64_t* out) {
  EXW_REQUIRE(traj);
  EXW_REQUIRE(out);
  return guarded([&] {
    *out = traj->traj.position_at(label, t);
    return EXW_OK;
  });
}

exw_status exw_trajectory_final_positions(const exw_trajectory* traj, int64_t* out, size_t n) {
  EXW_REQUIRE(traj);
  EXW_REQUIRE(out);
  return guarded([&] {
    const auto x = traj->traj.final_positions();
    if (n < x.size()) return fail(EXW_ERR_BUFFER, "buffer too small");
    std::memcpy(out, x.data(), x.size() * sizeof(int64_t));
    return EXW_OK;
  });
}

exw_status exw_trajectory_jump_times(const exw_trajectory* traj, size_t label, double* buf, size_t cap,
                                     size_t* count) {
  EXW_REQUIRE(traj);
  EXW_REQUIRE(count);
  return guarded([&] {
    const auto jumps = traj->traj.jump_times(label);
    *count = jumps.size();
    if (jumps.size() > cap) return fail(EXW_ERR_BUFFER, "buffer too small");
    if (!jumps.empty()) {
      if (buf == nullptr) return fail(EXW_ERR_NULL, "buf is NULL");
      std::memcpy(buf, jumps.data(), jumps.size() * sizeof(double));
    }
    return EXW_OK;
  });
}

exw_status exw_trajectory_write_csv(const exw_trajectory* traj, const char* path) {
  EXW_REQUIRE(traj);
  EXW_REQUIRE(path);
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) return fail(EXW_ERR_PRECONDITION, "cannot open output file");
    traj->traj.write_csv(os);
    return os ? EXW_OK : fail(EXW_ERR_INTERNAL, "write failed");
  });
}

exw_status exw_perm_identity(int64_t lo, int64_t hi, exw_perm** out) {
  EXW_REQUIRE(out);
  return guarded([&] {
    if (hi < lo) throw PreconditionError("hi < lo");
    *out = new exw_perm{PermutationConfig::identity(lo, hi)};
    return EXW_OK;
  });
}

void exw_perm_destroy(exw_perm* perm) { delete perm; }

exw_status exw_perm_swap(exw_perm* perm, int64_t z, int* swapped) {
  EXW_REQUIRE(perm);
  return guarded([&] {
    const bool s = perm->cfg.swap(z);
    if (swapped) *swapped = s ? 1 : 0;
    return EXW_OK;
  });
}

exw_status exw_perm_colour_at(const exw_perm* perm, int64_t z, int64_t* out) {
  EXW_REQUIRE(perm);
  EXW_REQUIRE(out);
  *out = perm->cfg.colour_at(z);
  return EXW_OK;
}

exw_status exw_perm_invert(const exw_perm* perm, exw_perm** out) {
  EXW_REQUIRE(perm);
  EXW_REQUIRE(out);
  return guarded([&] {
    *out = new exw_perm{invert(perm->cfg)};
    return EXW_OK;
  });
}

exw_status exw_perm_equal(const exw_perm* a, const exw_perm* b, int* equal) {
  EXW_REQUIRE(a);
  EXW_REQUIRE(b);
  EXW_REQUIRE(equal);
  *equal = a->cfg == b->cfg ? 1 : 0;
  return EXW_OK;
}

exw_status exw_colour_position_check(const int64_t* seq, size_t len, int* holds) {
  EXW_REQUIRE(holds);
  if (len > 0 && seq == nullptr) return fail(EXW_ERR_NULL, "seq is NULL");
  return guarded([&] {
    *holds = colour_position_check(std::span<const Site>(seq, len)) ? 1 : 0;
    return EXW_OK;
  });
}

exw_status exw_build_pi(const int64_t* u, size_t n, int64_t* swaps, size_t cap, size_t* count,
                        exw_perm** pi_id) {
  EXW_REQUIRE(u);
  EXW_REQUIRE(count);
  return guarded([&] {
    PiConstruction pi = build_pi(std::span<const Site>(u, n));
    *count = pi.swaps.size();
    if (pi.swaps.size() > cap) return fail(EXW_ERR_BUFFER, "buffer too small");
    if (!pi.swaps.empty()) {
      if (swaps == nullptr) return fail(EXW_ERR_NULL, "swaps is NULL");
      std::memcpy(swaps, pi.swaps.data(), pi.swaps.size() * sizeof(int64_t));
    }
    if (pi_id) *pi_id = new exw_perm{std::move(pi.pi_id)};
    return EXW_OK;
  });
}

exw_status exw_exchange_check(const int* occupied, size_t len, int64_t a, int64_t b, int64_t x,
                             exw_exchange_outcome* out) {
  EXW_REQUIRE(occupied);
  EXW_REQUIRE(out);
  return guarded([&] {
    std::unique_ptr<bool[]> occ(new bool[len]);
    for (size_t k = 0; k < len; ++k) occ[k] = occupied[k] != 0;
    switch (exchange_check(std::span<const bool>(occ.get(), len), a, b, x)) {
      case ExchangeOutcome::holds:
        *out = EXW_EXCHANGE_HOLDS;
        break;
      case ExchangeOutcome::fails:
        *out = EXW_EXCHANGE_FAILS;
        break;
      case ExchangeOutcome::hypothesis_not_met:
        *out = EXW_EXCHANGE_NOT_MET;
        break;
    }
    return EXW_OK;
  });
}

exw_status exw_run_experiment(const char* config_json, const exw_run_options* opts, exw_result** out) {
  EXW_REQUIRE(config_json);
  EXW_REQUIRE(out);
  return guarded([&] {
    RunOptions ro;
    if (opts) {
      if (opts->has_seed) ro.seed = opts->seed;
      if (opts->samples > 0) ro.samples = opts->samples;
      ro.threads = opts->replicas_in_flight;
    }
    json cfg;
    try {
      cfg = json::parse(config_json);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    auto* r = new exw_result{run_experiment(cfg, ro), {}};
    r->report = r->result.report.dump(2);
    *out = r;
    return EXW_OK;
  });
}

exw_status exw_selfcheck(exw_result** out) {
  EXW_REQUIRE(out);
  return exw_run_experiment(R"({"experiment":"selfcheck"})", nullptr, out);
}

void exw_result_destroy(exw_result* result) { delete result; }

int exw_result_verified(const exw_result* result) { return result && result->result.verified ? 1 : 0; }

const char* exw_result_report(const exw_result* result) { return result ? result->report.c_str() : ""; }

size_t exw_result_artifact_count(const exw_result* result) {
  return result ? result->result.artifacts.size() : 0;
}

const char* exw_result_artifact_name(const exw_result* result, size_t i) {
  if (!result || i >= result->result.artifacts.size()) return nullptr;
  return result->result.artifacts[i].name.c_str();
}

const char* exw_result_artifact_data(const exw_result* result, size_t i, size_t* len) {
  if (!result || i >= result->result.artifacts.size()) return nullptr;
  const auto& data = result->result.artifacts[i].data;
  if (len) *len = data.size();
  return data.data();
}

const char* exw_experiment_help(const char* experiment) {
  return experiment ? excluwall::experiment_help(experiment) : nullptr;
}

}  // extern "C"
