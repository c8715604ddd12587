// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "excluwall/experiments.hpp"
#include "oracle/master_equation.hpp"

using namespace excluwall;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned threads = 1;

RunResult run(const json& cfg) {
  RunOptions opt;
  opt.threads = threads;
  return run_experiment(cfg, opt);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Criteria 1 and 2 share one identity run.
json identity_records;

Outcome identity_grid() {
  const RunResult r = run({{"experiment", "verify-identity"}, {"grid", "standard"}, {"samples", 100000}, {"seed", 1}});
  identity_records = r.report["records"];
  std::size_t ok = 0;
  json cases = json::array();
  for (const auto& rec : identity_records) {
    ok += rec["verdict"].get<bool>() ? 1 : 0;
    if (cases.empty() || cases.back() != rec["params"]) cases.push_back(rec["params"]);
  }
  const bool pass = r.verified && cases.size() >= 18 && ok == identity_records.size();
  return {pass, std::to_string(cases.size()) + " configurations, " + std::to_string(ok) + "/" +
                    std::to_string(identity_records.size()) + " (config, s) pairs with overlapping 99% CIs"};
}

Outcome identity_oracle() {
  if (identity_records.empty()) identity_grid();
  std::size_t checked = 0, ok = 0;
  double worst = 0.0, worst_mass = 0.0;
  json current;
  std::optional<oracle::MasterEquation> me;
  for (const auto& rec : identity_records) {
    const json& c = rec["params"];
    const auto n = c["n"].get<std::size_t>();
    const double T = c["T"].get<double>();
    if (c != current) {
      current = c;
      const auto u = materialize_ic(parse_ic(c["ic"], n), 0);
      me.emplace(u, parse_wall(c["wall"], T), T);
      worst_mass = std::max(worst_mass, std::abs(me->total_mass() - 1.0));
    }
    const double exact = me->survival(n, rec["s"].get<Site>());
    for (const std::string side : {"lhs", "rhs"}) {
      const json& ci = rec["ci_" + side];
      const double half = 0.5 * (ci[1].get<double>() - ci[0].get<double>());
      const double err = std::abs(rec["p_" + side].get<double>() - exact);
      worst = std::max(worst, half > 0 ? err / half : (err == 0 ? 0.0 : 1e9));
      ok += err <= 3.0 * half ? 1 : 0;
      ++checked;
    }
  }
  const bool pass = ok == checked && worst_mass < 1e-6;
  return {pass, std::to_string(ok) + "/" + std::to_string(checked) +
                    " estimates within 3 half-widths (worst " + num(worst) + "), oracle mass defect " + num(worst_mass)};
}

Outcome poisson() {
  SamplingOptions opt{100000, 3, threads, 0.99};
  const auto x = sample_wall_positions({StepIC{0}, 1}, nullptr, 1, 1.0, opt);
  std::uint64_t hits = 0;
  for (Site v : x) hits += v > 2 ? 1 : 0;
  const Interval ci = wilson_ci(hits, x.size(), 0.99);
  const double exact = 1.0 - 2.5 / std::exp(1.0);
  return {ci.contains(exact), "p = " + num(static_cast<double>(hits) / x.size()) + ", CI [" + num(ci.lo) + ", " +
                                  num(ci.hi) + "], exact " + num(exact)};
}

Outcome envelope() {
  const RunResult r = run({{"experiment", "verify-coupling"},
                           {"seed", 4},
                           {"checks", json::array({{{"kind", "envelope"}, {"trials", 1000}, {"n_max", 6}, {"T_max", 4}}})}});
  return {r.verified, r.report["checks"][0].dump()};
}

json colour_report;

Outcome colour_position() {
  colour_report = run({{"experiment", "colour-position"},
                       {"seed", 5},
                       {"sequences", 10000},
                       {"max_length", 12},
                       {"exchange_max_width", 8},
                       {"pi_trials", 1000},
                       {"pi_max_n", 12},
                       {"marginal_cases", 100},
                       {"T_max", 4}})
                      .report;
  const json& cp = colour_report["colour_position"];
  const json& lm = colour_report["exchange"];
  return {cp["verdict"].get<bool>() && lm["verdict"].get<bool>(),
          "colour-position " + cp["holds"].dump() + "/" + cp["sequences"].dump() + ", exchange lemma " +
              lm["holds"].dump() + "/" + lm["cases"].dump()};
}

Outcome pi_construction() {
  if (colour_report.is_null()) colour_position();
  const json& pi = colour_report["pi"];
  return {pi["verdict"].get<bool>(), pi["holds"].dump() + "/" + pi["trials"].dump() + " initial conditions"};
}

Outcome marginal_consistency_check() {
  if (colour_report.is_null()) colour_position();
  const json& m = colour_report["marginal"];
  return {m["verdict"].get<bool>(), m["holds"].dump() + "/" + m["cases"].dump() + " shared-clock cases"};
}

Outcome hydrodynamics() {
  bool pass = true;
  std::string detail;
  for (int d : {1, 2, 4}) {
    const RunResult r = run({{"experiment", "density"},
                             {"seed", 8},
                             {"ic", {{"type", "half_periodic"}, {"d", d}}},
                             {"T", 500},
                             {"samples", 200},
                             {"bin_width", 25},
                             {"margin_factor", 3},
                             {"tolerance", 0.05}});
    pass = pass && r.verified;
    detail += "d=" + std::to_string(d) + ": sup error " + num(r.report["sup_error"].get<double>()) + "; ";
  }
  return {pass, detail};
}

Outcome shock() {
  const RunResult r = run({{"experiment", "density"},
                           {"seed", 9},
                           {"ic", {{"type", "step"}}},
                           {"wall", {{"preset", "demo_wall"}}},
                           {"T", 500},
                           {"samples", 200},
                           {"probe", {{"alpha", 0.1}}}});
  const json& p = r.report["probe"];
  return {p["verdict"].get<bool>(), "rho_l " + num(p["rho_left"].get<double>()) + ", rho_r " +
                                        num(p["rho_right"].get<double>()) + ", predicted rho_r " +
                                        num(p["predicted_right"].get<double>()) + ", xi " + num(p["xi"].get<double>())};
}

Outcome decoupling() {
  const RunResult r = run({{"experiment", "fluctuations"},
                           {"seed", 10},
                           {"mode", "decoupling"},
                           {"ic", {{"type", "half_periodic"}, {"d", 4}}},
                           {"wall", {{"preset", "demo_wall"}}},
                           {"alpha", demo_wall_alpha_d(4.0)},
                           {"T", {100, 200, 400}},
                           {"samples", 20000}});
  std::string detail;
  for (const auto& run : r.report["runs"]) {
    detail += "T=" + run["T"].dump() + ": " + num(run["discrepancy"].get<double>()) + " (band " +
              num(run["dkw_band"].get<double>()) + "); ";
  }
  return {r.verified, detail};
}

Outcome tail() {
  const RunResult r = run({{"experiment", "fluctuations"},
                           {"seed", 11},
                           {"mode", "tail"},
                           {"alpha", 0.25},
                           {"T", 500},
                           {"samples", 10000},
                           {"s", {1, 2, 3, 4}}});
  return {r.verified, "P(S >= s) = " + r.report["tail"].dump()};
}

Outcome determinism() {
  const std::vector<json> configs = {
      {{"experiment", "simulate"}, {"ic", {{"type", "half_bernoulli"}, {"rho", 0.5}}}, {"T", 8}, {"n", 10},
       {"replicas", 200}, {"seed", 12}},
      {{"experiment", "verify-identity"}, {"samples", 20000}, {"seed", 12},
       {"cases", {{{"ic", {{"type", "half_bernoulli"}, {"rho", 0.4}}}, {"wall", {{"preset", "demo_wall"}}}, {"n", 3},
                   {"T", 4}, {"s", {-4, -2, 0}}}}}},
      {{"experiment", "density"}, {"ic", {{"type", "half_periodic"}, {"d", 2}}}, {"T", 60}, {"samples", 40}, {"seed", 12}},
      {{"experiment", "fluctuations"}, {"mode", "tagged"}, {"T", 60}, {"alpha", 0.25}, {"samples", 300}, {"seed", 12}},
      {{"experiment", "fluctuations"}, {"mode", "decoupling"}, {"ic", {{"type", "half_periodic"}, {"d", 4}}},
       {"alpha", demo_wall_alpha_d(4.0)}, {"T", {40}}, {"samples", 300}, {"seed", 12}},
  };
  std::size_t compared = 0;
  for (const auto& cfg : configs) {
    RunOptions base_opt;
    const RunResult base = run_experiment(cfg, base_opt);
    for (unsigned t : {2u, 3u, 8u}) {
      RunOptions opt;
      opt.threads = t;
      const RunResult other = run_experiment(cfg, opt);
      if (other.artifacts.size() != base.artifacts.size()) return {false, "artifact count differs"};
      for (std::size_t i = 0; i < base.artifacts.size(); ++i) {
        if (other.artifacts[i].name != base.artifacts[i].name || other.artifacts[i].data != base.artifacts[i].data) {
          return {false, base.artifacts[i].name + " differs at " + std::to_string(t) + " threads"};
        }
        ++compared;
      }
    }
  }
  return {true, std::to_string(compared) + " artifacts byte-identical across 1, 2, 3 and 8 workers"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance run: one PASS/FAIL line per criterion."};
  std::size_t only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria = {
      identity_grid, identity_oracle, poisson,      envelope, colour_position, pi_construction,
      marginal_consistency_check, hydrodynamics,   shock,        decoupling, tail,          determinism,
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && k + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s - %s [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
