#include "excluwall/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "excluwall/replicas.hpp"

namespace excluwall {

namespace {

// ---------------------------------------------------------------------------
// Strict config access

void allow_keys(const json& j, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback,
                                const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get<std::vector<double>>(j, key, where);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t label_of(double alpha, double T) {
  const double n = std::floor(alpha * T);
  if (n < 1.0) throw ConfigError("alpha T must be at least 1");
  return static_cast<std::size_t>(n);
}

// IC with enough labels that particles beyond the last one cannot reach `lo` by time T.
std::vector<Site> covering_ic(const InitialConditionSpec& ic, Site lo, double T, std::uint64_t seed) {
  const double reach = static_cast<double>(lo) - T - 10.0 * std::cbrt(T);
  InitialConditionSpec spec = ic;
  spec.n_max = 64;
  for (;;) {
    auto u = materialize_ic(spec, seed);
    if (static_cast<double>(u.back()) < reach) {
      const auto it = std::find_if(u.begin(), u.end(), [&](Site x) { return static_cast<double>(x) < reach; });
      u.erase(it + 1, u.end());
      return u;
    }
    if (std::holds_alternative<ExplicitIC>(spec.kind)) return u;
    spec.n_max *= 2;
  }
}

json interval_json(const Interval& ci) { return json::array({ci.lo, ci.hi}); }

json report_json(const TwoSidedReport& r) {
  return {{"s", r.s},
          {"p_lhs", r.lhs.p},
          {"ci_lhs", interval_json(r.lhs.ci)},
          {"p_rhs", r.rhs.p},
          {"ci_rhs", interval_json(r.rhs.ci)},
          {"n_samples", r.lhs.trials},
          {"verdict", r.verdict}};
}

struct Context {
  std::string experiment;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> samples;
  unsigned threads = 1;
  std::string tag;  // s<seed>_<digest>

  std::size_t samples_or(const json& cfg, std::size_t fallback) const {
    if (samples) return static_cast<std::size_t>(*samples);
    return get_or<std::size_t>(cfg, "samples", fallback, experiment);
  }
  std::string name(const std::string& kind, const char* ext) const {
    return experiment + "_" + kind + "_" + tag + "." + ext;
  }
};

// ---------------------------------------------------------------------------

RunResult run_simulate(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "ic", "wall", "T", "n", "replicas"}, ctx.experiment);
  const double T = get<double>(cfg, "T", ctx.experiment);
  const auto n = get<std::size_t>(cfg, "n", ctx.experiment);
  const auto replicas = ctx.samples ? static_cast<std::size_t>(*ctx.samples)
                                    : get_or<std::size_t>(cfg, "replicas", 1, ctx.experiment);
  const InitialConditionSpec ic = parse_ic(get<json>(cfg, "ic", ctx.experiment), n);
  const auto f = parse_wall(cfg.value("wall", json()), T);
  const WallSpec wall = f ? WallSpec::right_wall(*f) : WallSpec::none();

  RunResult out;
  if (replicas <= 1) {
    ClockField clocks(replica_seed(ctx.seed, stream_lhs, 0), T);
    const auto u = materialize_ic(ic, replica_seed(ctx.seed, stream_ic, 0));
    const Trajectory traj = simulate(u, wall, T, clocks);
    std::ostringstream csv;
    traj.write_csv(csv);
    out.artifacts.push_back({ctx.name("trajectory", "csv"), csv.str()});
    out.report["final_positions"] = traj.final_positions();
    out.report["initial_positions"] = u;
    return out;
  }
  struct Ws {
    ClockField clocks;
    Trajectory traj;
  };
  const auto finals = run_replicas<Ws, std::vector<Site>>(replicas, ctx.threads, [&](std::size_t i, Ws& ws) {
    const auto u = materialize_ic(ic, replica_seed(ctx.seed, stream_ic, i));
    ws.clocks.reset(replica_seed(ctx.seed, stream_lhs, i), T);
    simulate_into(ws.traj, u, wall, T, ws.clocks);
    return ws.traj.final_positions();
  });
  std::ostringstream csv;
  csv << "replica,label,position\n";
  for (std::size_t r = 0; r < finals.size(); ++r) {
    for (std::size_t k = 0; k < finals[r].size(); ++k) csv << r << ',' << k + 1 << ',' << finals[r][k] << '\n';
  }
  out.artifacts.push_back({ctx.name("final_positions", "csv"), csv.str()});
  out.report["replicas"] = replicas;
  return out;
}

json standard_identity_grid() {
  const json walls = json::array({
      json{{"breakpoints", json::array({json::array({0, 0})})}},
      json{{"breakpoints", json::array({json::array({0, 0}), json::array({1, 1.5})})}, {"tail_slope", 0.5}},
      json{{"breakpoints", json::array({json::array({0, 0}), json::array({0.5, 1, 1})})}},
  });
  const json ics = json::array({
      json{{"type", "step"}},
      json{{"type", "half_periodic"}, {"d", 2}},
      json{{"type", "explicit"}, {"sites", json::array({0, -2, -5})}},
  });
  json cases = json::array();
  for (int n = 1; n <= 3; ++n) {
    for (double T : {1.0, 2.0, 4.0}) {
      for (const auto& w : walls) {
        for (const auto& ic : ics) {
          const InitialConditionSpec spec = parse_ic(ic, static_cast<std::size_t>(n));
          const Site un = materialize_ic(spec, 0).back();
          json s = json::array();
          for (Site v = un - 1; v <= un + 2; ++v) s.push_back(v);
          cases.push_back({{"ic", ic}, {"wall", w}, {"n", n}, {"T", T}, {"s", s}});
        }
      }
    }
  }
  return cases;
}

RunResult run_verify_identity(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "cases", "grid", "level"}, ctx.experiment);
  const double level = get_or<double>(cfg, "level", 0.99, ctx.experiment);
  json cases;
  if (cfg.contains("grid")) {
    if (get<std::string>(cfg, "grid", ctx.experiment) != "standard") {
      throw ConfigError("verify-identity: grid must be \"standard\"");
    }
    cases = standard_identity_grid();
  }
  if (cfg.contains("cases")) {
    for (const auto& c : cfg.at("cases")) cases.push_back(c);
  }
  if (cases.empty()) throw ConfigError("verify-identity: no cases (give \"cases\" or \"grid\")");
  const std::size_t samples = ctx.samples_or(cfg, 100000);

  RunResult out;
  out.report["records"] = json::array();
  std::ostringstream csv;
  csv << "case,n,T,s,p_lhs,ci_lhs_lo,ci_lhs_hi,p_rhs,ci_rhs_lo,ci_rhs_hi,n_samples,verdict\n";
  std::size_t index = 0;
  for (const auto& c : cases) {
    const std::string where = "verify-identity case " + std::to_string(index);
    allow_keys(c, {"ic", "wall", "n", "T", "s"}, where);
    const auto n = get<std::size_t>(c, "n", where);
    const double T = get<double>(c, "T", where);
    const auto s = get<std::vector<Site>>(c, "s", where);
    const InitialConditionSpec ic = parse_ic(get<json>(c, "ic", where), n);
    const auto f = parse_wall(c.value("wall", json()), T);
    SamplingOptions opt{samples, replica_seed(ctx.seed, 7, index), ctx.threads, level};
    const auto reports = estimate_wall_identity(ic, f ? &*f : nullptr, n, T, s, opt);
    for (const auto& r : reports) {
      json rec = report_json(r);
      rec["params"] = c;
      out.report["records"].push_back(rec);
      out.verified = out.verified && r.verdict;
      csv << index << ',' << n << ',' << fmt(T) << ',' << r.s << ',' << fmt(r.lhs.p) << ','
          << fmt(r.lhs.ci.lo) << ',' << fmt(r.lhs.ci.hi) << ',' << fmt(r.rhs.p) << ','
          << fmt(r.rhs.ci.lo) << ',' << fmt(r.rhs.ci.hi) << ',' << r.lhs.trials << ','
          << (r.verdict ? 1 : 0) << '\n';
    }
    ++index;
  }
  out.artifacts.push_back({ctx.name("identity", "csv"), csv.str()});
  return out;
}

RunResult run_verify_coupling(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "checks", "level"}, ctx.experiment);
  const double level = get_or<double>(cfg, "level", 0.99, ctx.experiment);
  const json checks = get<json>(cfg, "checks", ctx.experiment);
  if (!checks.is_array() || checks.empty()) throw ConfigError("verify-coupling: checks must be a nonempty array");
  RunResult out;
  out.report["checks"] = json::array();
  std::size_t index = 0;
  for (const auto& c : checks) {
    const std::string where = "verify-coupling check " + std::to_string(index);
    const auto kind = get<std::string>(c, "kind", where);
    json rec{{"kind", kind}};
    const std::uint64_t seed = replica_seed(ctx.seed, 8, index);
    if (kind == "envelope") {
      allow_keys(c, {"kind", "trials", "n_max", "T_max"}, where);
      const auto trials = get_or<std::size_t>(c, "trials", 1000, where);
      const auto n_max = get_or<std::size_t>(c, "n_max", 6, where);
      const double T_max = get_or<double>(c, "T_max", 4.0, where);
      std::mt19937_64 rng(seed);
      std::size_t exact = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, n_max)(rng);
        const auto u = random_ic(rng, n);
        const double T = std::uniform_real_distribution<double>(0.0, T_max)(rng);
        ClockField clocks(rng(), T);
        exact += envelope_pathwise(u, n, T, clocks) ? 1 : 0;
      }
      rec["trials"] = trials;
      rec["exact"] = exact;
      rec["verdict"] = exact == trials;
    } else if (kind == "shifted_minimum") {
      allow_keys(c, {"kind", "labels", "Z", "T", "s"}, where);
      const auto labels = get<std::vector<std::size_t>>(c, "labels", where);
      const auto Z = get<std::vector<Site>>(c, "Z", where);
      SamplingOptions opt{ctx.samples_or(json::object(), 100000), seed, ctx.threads, level};
      const auto r = shifted_minimum_mc(labels, Z, get<double>(c, "T", where), get<Site>(c, "s", where), opt);
      rec.update(report_json(r));
    } else if (kind == "variational") {
      allow_keys(c, {"kind", "ic", "n", "T", "s"}, where);
      const auto n = get<std::size_t>(c, "n", where);
      const auto s = get<std::vector<Site>>(c, "s", where);
      SamplingOptions opt{ctx.samples_or(json::object(), 100000), seed, ctx.threads, level};
      const auto reports = variational_onepoint_estimate(parse_ic(get<json>(c, "ic", where), n), n,
                                                         get<double>(c, "T", where), s, opt);
      rec["records"] = json::array();
      bool ok = true;
      for (const auto& r : reports) {
        rec["records"].push_back(report_json(r));
        ok = ok && r.verdict;
      }
      rec["verdict"] = ok;
    } else {
      throw ConfigError(where + ": unknown kind '" + kind + "'");
    }
    out.verified = out.verified && rec["verdict"].get<bool>();
    out.report["checks"].push_back(rec);
    ++index;
  }
  return out;
}

RunResult run_colour_position(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "sequences", "max_length", "window",
                   "exchange_max_width", "pi_trials", "pi_max_n", "marginal_cases", "T_max"},
             ctx.experiment);
  const auto sequences = get_or<std::size_t>(cfg, "sequences", 10000, ctx.experiment);
  const auto max_length = get_or<std::size_t>(cfg, "max_length", 12, ctx.experiment);
  const auto window = get_or<std::vector<Site>>(cfg, "window", {-6, 6}, ctx.experiment);
  if (window.size() != 2 || window[1] <= window[0]) throw ConfigError("colour-position: window must be [lo, hi]");
  const auto width = get_or<Site>(cfg, "exchange_max_width", 8, ctx.experiment);
  const auto pi_trials = get_or<std::size_t>(cfg, "pi_trials", 1000, ctx.experiment);
  const auto pi_max_n = get_or<std::size_t>(cfg, "pi_max_n", 12, ctx.experiment);
  const auto marginal_cases = get_or<std::size_t>(cfg, "marginal_cases", 100, ctx.experiment);
  const double T_max = get_or<double>(cfg, "T_max", 4.0, ctx.experiment);

  std::mt19937_64 rng(replica_seed(ctx.seed, 9, 0));
  RunResult out;

  std::size_t cp_ok = 0;
  for (std::size_t i = 0; i < sequences; ++i) {
    const std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_length)(rng);
    std::vector<Site> seq(len);
    for (auto& z : seq) z = std::uniform_int_distribution<Site>(window[0], window[1] - 1)(rng);
    cp_ok += colour_position_check(seq) ? 1 : 0;
  }
  out.report["colour_position"] = {{"sequences", sequences}, {"holds", cp_ok}, {"verdict", cp_ok == sequences}};

  std::size_t lemma_cases = 0, lemma_holds = 0, lemma_skipped = 0;
  for (Site w = 1; w <= width; ++w) {
    const auto sites = static_cast<std::size_t>(w + 1);
    for (std::uint64_t mask = 0; mask < (1ULL << sites); ++mask) {
      std::unique_ptr<bool[]> occ(new bool[sites]);
      for (std::size_t k = 0; k < sites; ++k) occ[k] = (mask >> k) & 1ULL;
      for (Site x = 0; x < w; ++x) {
        const auto r = exchange_check(std::span<const bool>(occ.get(), sites), 0, w, x);
        if (r == ExchangeOutcome::hypothesis_not_met) {
          ++lemma_skipped;
        } else {
          ++lemma_cases;
          lemma_holds += r == ExchangeOutcome::holds ? 1 : 0;
        }
      }
    }
  }
  out.report["exchange"] = {{"cases", lemma_cases}, {"holds", lemma_holds},
                           {"hypothesis_not_met", lemma_skipped}, {"verdict", lemma_cases == lemma_holds}};

  std::size_t pi_ok = 0;
  for (std::size_t t = 0; t < pi_trials; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, pi_max_n)(rng);
    const auto u = random_ic(rng, n);
    const PiConstruction pi = build_pi(u);
    bool ok = invert(pi.pi_id) == pi.pi_id;
    const Colour cutoff = u.back() + static_cast<Site>(n) - 1;
    const Occupancy occ = marginal(pi.pi_id, cutoff);
    const std::set<Site> sites(u.begin(), u.end());
    for (Site z = u.back(); z <= std::max<Site>(occ.hi, u.front()) + 1; ++z) {
      ok = ok && occ.contains(z) == (sites.count(z) == 1);
    }
    pi_ok += ok ? 1 : 0;
  }
  out.report["pi"] = {{"trials", pi_trials}, {"holds", pi_ok}, {"verdict", pi_ok == pi_trials}};

  std::size_t mc_ok = 0;
  const PiecewiseFn kink = PiecewiseFn::from_breakpoints({{0, 0, 0}, {1, 1.5, 0}}, 0.5);
  const PiecewiseFn stairs = PiecewiseFn::from_breakpoints({{0, 0, 0}, {0.5, 1, 1}});
  for (std::size_t t = 0; t < marginal_cases; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const bool step = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
    const auto u = step ? materialize_ic({StepIC{0}, n}, 0) : random_ic(rng, n);
    const int w = std::uniform_int_distribution<int>(0, 2)(rng);
    const PiecewiseFn* f = w == 0 ? nullptr : (w == 1 ? &kink : &stairs);
    const double T = std::uniform_real_distribution<double>(0.0, T_max)(rng);
    mc_ok += marginal_consistency(u, f, T, rng()).equal ? 1 : 0;
  }
  out.report["marginal"] = {{"cases", marginal_cases}, {"holds", mc_ok}, {"verdict", mc_ok == marginal_cases}};

  out.verified = cp_ok == sequences && lemma_cases == lemma_holds && pi_ok == pi_trials &&
                 mc_ok == marginal_cases;
  return out;
}

double ic_density_parameter(const InitialConditionSpec& ic) {
  if (std::holds_alternative<StepIC>(ic.kind)) return 1.0;
  if (const auto* p = std::get_if<HalfPeriodicIC>(&ic.kind)) return p->d;
  return std::nan("");
}

RunResult run_density(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "ic", "wall", "T", "bin_width", "region",
                   "margin_factor", "tolerance", "probe"},
             ctx.experiment);
  const double T = get<double>(cfg, "T", ctx.experiment);
  const std::size_t replicas = ctx.samples_or(cfg, 200);
  const InitialConditionSpec ic = parse_ic(get<json>(cfg, "ic", ctx.experiment), 1);
  const auto f = parse_wall(cfg.value("wall", json()), T);
  const Site bin = get_or<Site>(cfg, "bin_width", 25, ctx.experiment);
  const auto tT = static_cast<Site>(std::llround(T));
  const auto region = get_or<std::vector<Site>>(cfg, "region", {-tT, tT}, ctx.experiment);
  if (region.size() != 2) throw ConfigError("density: region must be [lo, hi]");
  const double margin = get_or<double>(cfg, "margin_factor", 3.0, ctx.experiment);
  const double tol = get_or<double>(cfg, "tolerance", 0.05, ctx.experiment);

  RunResult out;
  const DensityRun run = density_run(ic, f ? &*f : nullptr, T, replicas, bin, region[0], region[1],
                                     margin, ctx.seed, ctx.threads);
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,centre,density,predicted,scored\n";
  for (std::size_t k = 0; k < run.profile.density.size(); ++k) {
    const Site lo = run.profile.lo + static_cast<Site>(k) * bin;
    csv << lo << ',' << lo + bin - 1 << ',' << fmt(run.profile.bin_centre(k)) << ','
        << fmt(run.profile.density[k]) << ',' << (run.predicted.empty() ? "" : fmt(run.predicted[k])) << ','
        << (run.scored.empty() ? 0 : (run.scored[k] ? 1 : 0)) << '\n';
  }
  out.artifacts.push_back({ctx.name("density", "csv"), csv.str()});
  out.report["replicas"] = replicas;
  if (!run.predicted.empty()) {
    out.report["sup_error"] = run.sup_error;
    out.report["tolerance"] = tol;
    out.verified = run.sup_error <= tol;
  }
  if (cfg.contains("probe")) {
    const json& p = cfg.at("probe");
    allow_keys(p, {"alpha"}, "density probe");
    const double alpha = get<double>(p, "alpha", "density probe");
    const double d = ic_density_parameter(ic);
    const ShockProbe sp = shock_probe(ic, d, f ? &*f : nullptr, T, alpha, replicas, replica_seed(ctx.seed, 10, 0),
                                      ctx.threads);
    const bool ok = sp.rho_right - sp.rho_left >= 0.1 && std::abs(sp.rho_right - sp.predicted.right) <= 0.1;
    out.report["probe"] = {{"alpha", sp.alpha},         {"xi", sp.xi},
                           {"rho_left", sp.rho_left},   {"rho_right", sp.rho_right},
                           {"predicted_right", sp.predicted.right},
                           {"left_bound", sp.predicted.left_bound},
                           {"window", sp.window},       {"mean_position", sp.mean_position},
                           {"verdict", ok}};
    out.verified = out.verified && ok;
  }
  return out;
}

RunResult run_fluctuations(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "ic", "wall", "T", "alpha", "xi", "mode", "tau",
                   "s", "S_grid", "level"},
             ctx.experiment);
  const auto mode = get<std::string>(cfg, "mode", ctx.experiment);
  const double alpha = get<double>(cfg, "alpha", ctx.experiment);
  const std::size_t samples = ctx.samples_or(cfg, 10000);
  const json ic_json = cfg.value("ic", json{{"type", "step"}});
  const InitialConditionSpec ic = parse_ic(ic_json, 1);
  RunResult out;
  out.report["mode"] = mode;

  if (mode == "decoupling") {
    const auto Ts = number_list(cfg, "T", {}, ctx.experiment);
    if (Ts.empty()) throw ConfigError("fluctuations: T required");
    const double d = ic_density_parameter(ic);
    const double xi = cfg.contains("xi") ? get<double>(cfg, "xi", ctx.experiment)
                                         : demo_wall_classify(d, alpha).xi;
    std::vector<double> grid = number_list(cfg, "S_grid", {}, ctx.experiment);
    if (grid.empty()) {
      for (int k = -16; k <= 16; ++k) grid.push_back(0.25 * k);
    }
    out.report["runs"] = json::array();
    std::ostringstream csv;
    csv << "T,S,s,surv_lhs,surv_comp1,surv_comp2\n";
    double worst_ratio = 0.0;
    std::vector<DecouplingRun> runs;
    for (std::size_t k = 0; k < Ts.size(); ++k) {
      const double T = Ts[k];
      const auto f = parse_wall(cfg.value("wall", json{{"preset", "demo_wall"}}), T);
      if (!f) throw ConfigError("fluctuations: decoupling needs a wall");
      runs.push_back(decoupling_run(ic, *f, T, alpha, xi, grid, samples, replica_seed(ctx.seed, 11, k),
                                    ctx.threads, get_or<double>(cfg, "level", 0.99, ctx.experiment)));
      const auto& r = runs.back();
      out.report["runs"].push_back({{"T", T}, {"label", r.label}, {"discrepancy", r.discrepancy}, {"dkw_band", r.band}});
      worst_ratio = std::max(worst_ratio, r.discrepancy / r.band);
      for (std::size_t g = 0; g < r.grid.size(); ++g) {
        csv << fmt(T) << ',' << fmt(grid[g]) << ',' << fmt(r.grid[g]) << ',' << fmt(r.s_lhs[g]) << ','
            << fmt(r.s_comp1[g]) << ',' << fmt(r.s_comp2[g]) << '\n';
      }
    }
    const auto& last = runs.back();
    bool ok = last.discrepancy < 4.0 * last.band;
    if (runs.size() >= 2) {
      const auto& prev = runs[runs.size() - 2];
      ok = ok && last.discrepancy <= prev.discrepancy + last.band;
    }
    out.report["xi"] = xi;
    out.report["verdict"] = ok;
    out.verified = ok;
    out.artifacts.push_back({ctx.name("decoupling", "csv"), csv.str()});
    return out;
  }

  const double T = get<double>(cfg, "T", ctx.experiment);
  const auto f = parse_wall(cfg.value("wall", json()), T);
  if (mode == "fixed_time") {
    const auto tau = number_list(cfg, "tau", {0.0}, ctx.experiment);
    const auto xs = fixed_time_samples(alpha, T, tau, samples, ctx.seed, ctx.threads);
    std::ostringstream csv;
    csv << "replica,tau,X\n";
    std::vector<double> mean(tau.size(), 0.0);
    for (std::size_t r = 0; r < xs.size(); ++r) {
      for (std::size_t k = 0; k < tau.size(); ++k) {
        csv << r << ',' << fmt(tau[k]) << ',' << fmt(xs[r][k]) << '\n';
        mean[k] += xs[r][k] / static_cast<double>(xs.size());
      }
    }
    out.report["tau"] = tau;
    out.report["mean"] = mean;
    out.artifacts.push_back({ctx.name("fixed_time", "csv"), csv.str()});
    return out;
  }
  const double xi = cfg.contains("xi") ? get<double>(cfg, "xi", ctx.experiment) : 1.0 - 2.0 * std::sqrt(alpha);
  const auto S = tagged_samples(ic, f ? &*f : nullptr, T, alpha, xi, samples, ctx.seed, ctx.threads);
  const double mean = std::accumulate(S.begin(), S.end(), 0.0) / static_cast<double>(S.size());
  double var = 0.0;
  for (double v : S) var += (v - mean) * (v - mean);
  var /= static_cast<double>(S.size() > 1 ? S.size() - 1 : 1);
  out.report["xi"] = xi;
  out.report["mean"] = mean;
  out.report["variance"] = var;
  if (mode == "tagged") {
    std::ostringstream csv;
    csv << "replica,S\n";
    for (std::size_t r = 0; r < S.size(); ++r) csv << r << ',' << fmt(S[r]) << '\n';
    out.artifacts.push_back({ctx.name("tagged", "csv"), csv.str()});
    return out;
  }
  if (mode == "tail") {
    const auto s = number_list(cfg, "s", {1, 2, 3, 4}, ctx.experiment);
    std::vector<double> p;
    for (double v : s) {
      p.push_back(static_cast<double>(std::count_if(S.begin(), S.end(), [&](double x) { return x >= v; })) /
                  static_cast<double>(S.size()));
    }
    bool monotone = true;
    for (std::size_t k = 1; k < p.size(); ++k) monotone = monotone && p[k] <= p[k - 1];
    const bool decay = !p.empty() && p.back() < p.front() / 10.0;
    out.report["s"] = s;
    out.report["tail"] = p;
    out.report["verdict"] = monotone && decay;
    out.verified = monotone && decay;
    return out;
  }
  throw ConfigError("fluctuations: mode must be tagged, fixed_time, tail or decoupling");
}

RunResult run_classify(const json& cfg, const Context& ctx) {
  allow_keys(cfg, {"experiment", "seed", "samples", "d", "alpha"}, ctx.experiment);
  const double d = get<double>(cfg, "d", ctx.experiment);
  const auto alphas = number_list(cfg, "alpha", {}, ctx.experiment);
  if (alphas.empty()) throw ConfigError("classify: alpha required");
  RunResult out;
  out.report["d"] = d;
  if (d > 2.0) out.report["alpha_d"] = demo_wall_alpha_d(d);
  out.report["regimes"] = json::array();
  for (double a : alphas) {
    const Regime r = demo_wall_classify(d, a);
    json rec{{"alpha", a}, {"law", r.law}, {"scales", r.scales}, {"influence", r.influence}, {"tabulated", r.tabulated}};
    rec["xi"] = r.tabulated ? json(r.xi) : json();
    rec["g_alpha"] = g_alpha_periodic(d, a);
    if (!r.influence.empty()) {
      const auto sd = shock_densities(a, r.influence.front(), r.influence.back());
      rec["rho_right"] = sd.right;
      rec["rho_left_bound"] = sd.left_bound;
    }
    out.report["regimes"].push_back(rec);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t config_digest(const json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

InitialConditionSpec parse_ic(const json& j, std::size_t n_max) {
  const std::string where = "ic";
  const auto type = get<std::string>(j, "type", where);
  InitialConditionSpec spec;
  spec.n_max = n_max;
  if (type == "step") {
    allow_keys(j, {"type", "offset"}, where);
    spec.kind = StepIC{get_or<Site>(j, "offset", 0, where)};
  } else if (type == "explicit") {
    allow_keys(j, {"type", "sites"}, where);
    spec.kind = ExplicitIC{get<std::vector<Site>>(j, "sites", where)};
  } else if (type == "half_periodic") {
    allow_keys(j, {"type", "d"}, where);
    spec.kind = HalfPeriodicIC{get<double>(j, "d", where)};
  } else if (type == "half_bernoulli") {
    allow_keys(j, {"type", "rho"}, where);
    spec.kind = HalfBernoulliIC{get<double>(j, "rho", where)};
  } else if (type == "stationary") {
    allow_keys(j, {"type", "rho", "window"}, where);
    spec.kind = StationaryIC{get<double>(j, "rho", where), get_or<Site>(j, "window", 0, where)};
  } else {
    throw ConfigError("ic: unknown type '" + type + "'");
  }
  return spec;
}

std::optional<PiecewiseFn> parse_wall(const json& j, double T) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return std::nullopt;
    throw ConfigError("wall: expected \"none\" or an object");
  }
  const std::string where = "wall";
  if (j.contains("preset")) {
    allow_keys(j, {"preset", "T"}, where);
    const auto preset = get<std::string>(j, "preset", where);
    if (preset == "demo_wall") return PiecewiseFn::demo_wall(get_or<double>(j, "T", T, where));
    if (preset == "zero") return PiecewiseFn{};
    throw ConfigError("wall: unknown preset '" + preset + "'");
  }
  allow_keys(j, {"breakpoints", "tail_slope"}, where);
  std::vector<Breakpoint> knots;
  for (const auto& b : get<json>(j, "breakpoints", where)) {
    if (!b.is_array() || b.size() < 2 || b.size() > 3) {
      throw ConfigError("wall: breakpoints are [t, value] or [t, value, jump]");
    }
    knots.push_back({b[0].get<double>(), b[1].get<double>(), b.size() == 3 ? b[2].get<double>() : 0.0});
  }
  return PiecewiseFn::from_breakpoints(std::move(knots), get_or<double>(j, "tail_slope", 0.0, where));
}

std::vector<Site> random_ic(std::mt19937_64& rng, std::size_t n) {
  std::vector<Site> u(n);
  u[0] = -std::uniform_int_distribution<Site>(0, 3)(rng);
  for (std::size_t i = 1; i < n; ++i) u[i] = u[i - 1] - 1 - std::uniform_int_distribution<Site>(0, 3)(rng);
  return u;
}

MarginalCase marginal_consistency(std::span<const Site> u, const PiecewiseFn* f, double T,
                                  std::uint64_t seed) {
  const std::size_t n = u.size();
  const Colour cutoff = u.back() + static_cast<Site>(n) - 1;
  PermutationConfig cfg0 = n >= 2 ? build_pi(u).pi_id : PermutationConfig{};
  const Site hi = std::max<Site>(u.front(), 0) + 40 + static_cast<Site>(8.0 * T);
  cfg0.ensure(u.back() - 2, hi);

  ClockField clocks(seed, T);
  const WallSpec wall = f ? WallSpec::right_wall(*f) : WallSpec::none();
  const Trajectory traj = simulate(u, wall, T, clocks);

  MarginalCase out;
  auto top_n = [&](const PermutationConfig& cfg) {
    std::vector<Site> sites;
    for (Site z = cfg.hi(); z >= cfg.lo() && sites.size() < n; --z) {
      if (cfg.colour_at(z) <= cutoff) sites.push_back(z);
    }
    return sites;
  };
  auto compare_at = [&](double t, const PermutationConfig& cfg) {
    const auto sites = top_n(cfg);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= sites.size() || sites[i] != traj.position_at(i + 1, t)) out.equal = false;
    }
    if (!sites.empty() && sites.front() >= hi) out.equal = false;
  };
  compare_at(0.0, cfg0);
  auto admissible = [&](Site z, double t) { return f == nullptr || static_cast<double>(z + 1) <= (*f)(t); };
  simulate_multi(cfg0, admissible, T, clocks, [&](double t, Site, bool, const PermutationConfig& cfg) {
    ++out.events;
    compare_at(t, cfg);
  });
  return out;
}

DensityRun density_run(const InitialConditionSpec& ic, const PiecewiseFn* f, double T,
                       std::size_t replicas, Site bin_width, Site lo, Site hi, double margin_factor,
                       std::uint64_t seed, unsigned threads) {
  const WallSpec wall = f ? WallSpec::right_wall(*f) : WallSpec::none();
  const bool random = ic.is_random();
  const auto fixed = random ? std::vector<Site>{} : covering_ic(ic, lo, T, 0);
  struct Ws {
    ClockField clocks;
    Trajectory traj;
  };
  const auto finals = run_replicas<Ws, std::vector<Site>>(replicas, threads, [&](std::size_t i, Ws& ws) {
    const auto u = random ? covering_ic(ic, lo, T, replica_seed(seed, stream_ic, i)) : fixed;
    ws.clocks.reset(replica_seed(seed, stream_lhs, i), T);
    simulate_into(ws.traj, u, wall, T, ws.clocks);
    return ws.traj.final_positions();
  });
  DensityRun out;
  out.profile = empirical_density(finals, bin_width, lo, hi);
  const double d = ic_density_parameter(ic);
  if (f == nullptr && std::isfinite(d)) {
    const double margin = margin_factor * std::pow(T, 2.0 / 3.0);
    std::vector<double> kinks = {(1.0 - 2.0 / d) * T, T};
    for (std::size_t k = 0; k < out.profile.density.size(); ++k) {
      const double a = static_cast<double>(lo + static_cast<Site>(k) * bin_width);
      const double b = a + static_cast<double>(bin_width);
      // Average of the profile over the integer sites of the bin.
      double pred = 0.0;
      for (Site z = static_cast<Site>(a); z < static_cast<Site>(b); ++z) pred += density_profile_periodic(static_cast<double>(z), T, d);
      pred /= static_cast<double>(bin_width);
      out.predicted.push_back(pred);
      bool scored = true;
      for (double kx : kinks) scored = scored && (b - 1.0 < kx - margin || a > kx + margin);
      out.scored.push_back(scored);
      if (scored) out.sup_error = std::max(out.sup_error, std::abs(out.profile.density[k] - pred));
    }
  }
  return out;
}

ShockProbe shock_probe(const InitialConditionSpec& ic, double d, const PiecewiseFn* f, double T,
                       double alpha, std::size_t replicas, std::uint64_t seed, unsigned threads) {
  const Regime regime = demo_wall_classify(std::isfinite(d) ? d : 1.0, alpha);
  if (regime.influence.empty()) throw DomainError("shock probe needs a wall-influenced regime");
  ShockProbe out;
  out.alpha = alpha;
  out.xi = regime.xi;
  out.predicted = shock_densities(alpha, regime.influence.front(), regime.influence.back());
  out.window = static_cast<Site>(std::llround(std::pow(T, 2.0 / 3.0)));
  const std::size_t label = label_of(alpha, T);
  const WallSpec wall = f ? WallSpec::right_wall(*f) : WallSpec::none();
  struct Ws {
    ClockField clocks;
    Trajectory traj;
  };
  struct Probe {
    double left = 0.0, right = 0.0, position = 0.0;
  };
  const Site w = out.window;
  const auto probes = run_replicas<Ws, Probe>(replicas, threads, [&](std::size_t i, Ws& ws) {
    InitialConditionSpec spec = ic;
    spec.n_max = label + static_cast<std::size_t>(2 * w) + 16;
    const auto u = materialize_ic(spec, replica_seed(seed, stream_ic, i));
    ws.clocks.reset(replica_seed(seed, stream_lhs, i), T);
    simulate_into(ws.traj, u, wall, T, ws.clocks);
    const auto x = ws.traj.final_positions();
    const Site c = x[label - 1];
    Probe p;
    p.position = static_cast<double>(c);
    for (Site z : x) {
      if (z >= c - w && z < c) p.left += 1.0;
      if (z > c && z <= c + w) p.right += 1.0;
    }
    p.left /= static_cast<double>(w);
    p.right /= static_cast<double>(w);
    return p;
  });
  for (const auto& p : probes) {
    out.rho_left += p.left / static_cast<double>(replicas);
    out.rho_right += p.right / static_cast<double>(replicas);
    out.mean_position += p.position / static_cast<double>(replicas);
  }
  return out;
}

DecouplingRun decoupling_run(const InitialConditionSpec& ic, const PiecewiseFn& f, double T,
                             double alpha, double xi, std::span<const double> S_grid,
                             std::size_t samples, std::uint64_t seed, unsigned threads, double level) {
  DecouplingRun out;
  out.T = T;
  out.label = label_of(alpha, T);
  const std::size_t n = out.label;
  InitialConditionSpec spec = ic;
  spec.n_max = n;
  const std::vector<Site> step = materialize_ic({StepIC{0}, n}, 0);
  struct Ws {
    ClockField clocks;
    Trajectory traj;
  };
  const WallSpec wall = WallSpec::right_wall(f);
  auto run = [&](std::uint64_t stream, auto&& body) {
    return run_replicas<Ws, double>(samples, threads, [&](std::size_t i, Ws& ws) {
      ws.clocks.reset(replica_seed(seed, stream, i), T);
      return body(i, ws);
    });
  };
  const auto lhs = run(stream_lhs, [&](std::size_t i, Ws& ws) {
    const auto u = materialize_ic(spec, replica_seed(seed, stream_ic, 3 * i));
    simulate_into(ws.traj, u, wall, T, ws.clocks);
    return static_cast<double>(ws.traj.final_position(n));
  });
  const auto comp1 = run(stream_rhs, [&](std::size_t, Ws& ws) {
    simulate_into(ws.traj, step, WallSpec::none(), T, ws.clocks);
    return static_cast<double>(wall_margin(ws.traj, n, &f, T));
  });
  const auto comp2 = run(3, [&](std::size_t i, Ws& ws) {
    const auto u = materialize_ic(spec, replica_seed(seed, stream_ic, 3 * i + 1));
    simulate_into(ws.traj, u, WallSpec::none(), T, ws.clocks);
    return static_cast<double>(ws.traj.final_position(n));
  });
  const Ecdf e_lhs(lhs), e1(comp1), e2(comp2);
  const double t13 = std::cbrt(T);
  for (double S : S_grid) {
    const double s = xi * T - S * t13;
    out.grid.push_back(s);
    out.s_lhs.push_back(e_lhs.survival(s));
    out.s_comp1.push_back(e1.survival(s));
    out.s_comp2.push_back(e2.survival(s));
  }
  out.discrepancy = decoupling_check(e_lhs, e1, e2, out.grid);
  out.band = dkw_band(samples, level);
  return out;
}

std::vector<double> tagged_samples(const InitialConditionSpec& ic, const PiecewiseFn* f, double T,
                                   double alpha, double xi, std::size_t samples, std::uint64_t seed,
                                   unsigned threads) {
  const std::size_t n = label_of(alpha, T);
  InitialConditionSpec spec = ic;
  spec.n_max = n;
  const std::vector<Site> x = sample_wall_positions(spec, f, n, T, {samples, seed, threads, 0.99});
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = rescale_tagged(static_cast<double>(x[i]), xi, T);
  return out;
}

std::vector<std::vector<double>> fixed_time_samples(double alpha, double T, std::span<const double> tau,
                                                    std::size_t samples, std::uint64_t seed,
                                                    unsigned threads) {
  const TaggedConstants c = tagged_constants(alpha);
  double top = alpha * T;
  for (double t : tau) top = std::max(top, alpha * T + c.c2_hat * t * std::pow(T, 2.0 / 3.0));
  const auto n = static_cast<std::size_t>(std::floor(top));
  if (n < 1) throw DomainError("fixed-time labels below 1");
  const std::vector<Site> step = materialize_ic({StepIC{0}, n}, 0);
  const std::vector<double> grid(tau.begin(), tau.end());
  struct Ws {
    ClockField clocks;
    Trajectory traj;
  };
  return run_replicas<Ws, std::vector<double>>(samples, threads, [&](std::size_t i, Ws& ws) {
    ws.clocks.reset(replica_seed(seed, stream_lhs, i), T);
    simulate_into(ws.traj, step, WallSpec::none(), T, ws.clocks);
    return rescale_fixed_time(ws.traj.final_positions(), alpha, T, grid);
  });
}

// ---------------------------------------------------------------------------

RunResult run_experiment(const json& config, const RunOptions& options) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  Context ctx;
  ctx.experiment = get<std::string>(config, "experiment", "config");
  ctx.seed = options.seed ? *options.seed : get_or<std::uint64_t>(config, "seed", 0, "config");
  ctx.samples = options.samples;
  ctx.threads = std::max(1u, options.threads);
  json digest_input = config;
  digest_input["seed"] = ctx.seed;
  if (ctx.samples) digest_input["samples"] = *ctx.samples;
  const std::uint64_t digest = config_digest(digest_input);
  ctx.tag = "s" + std::to_string(ctx.seed) + "_" + hex64(digest).substr(0, 12);

  RunResult out;
  try {
    if (ctx.experiment == "simulate") {
      out = run_simulate(config, ctx);
    } else if (ctx.experiment == "verify-identity") {
      out = run_verify_identity(config, ctx);
    } else if (ctx.experiment == "verify-coupling") {
      out = run_verify_coupling(config, ctx);
    } else if (ctx.experiment == "colour-position") {
      out = run_colour_position(config, ctx);
    } else if (ctx.experiment == "density") {
      out = run_density(config, ctx);
    } else if (ctx.experiment == "fluctuations") {
      out = run_fluctuations(config, ctx);
    } else if (ctx.experiment == "classify") {
      out = run_classify(config, ctx);
    } else if (ctx.experiment == "selfcheck") {
      allow_keys(config, {"experiment", "seed", "samples"}, ctx.experiment);
      out = run_selfcheck();
    } else {
      throw ConfigError("unknown experiment '" + ctx.experiment + "'");
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(ctx.experiment + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(ctx.experiment + ": " + e.what());
  }
  out.report["experiment"] = ctx.experiment;
  out.report["seed"] = ctx.seed;
  out.report["config_digest"] = hex64(digest);
  out.report["verified"] = out.verified;
  out.artifacts.push_back({ctx.name("report", "json"), out.report.dump(2) + "\n"});
  return out;
}

}  // namespace excluwall
