#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "excluwall/experiments.hpp"

namespace excluwall {

namespace {

class Suite {
 public:
  void check(const std::string& name, const std::function<bool()>& body) {
    bool ok = false;
    std::string error;
    try {
      ok = body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    json rec{{"name", name}, {"pass", ok}};
    if (!error.empty()) rec["error"] = error;
    records_.push_back(rec);
    all_ = all_ && ok;
  }
  json records() const { return records_; }
  bool all() const { return all_; }

 private:
  json records_ = json::array();
  bool all_ = true;
};

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::vector<Site> step_positions(std::size_t n) { return materialize_ic({StepIC{0}, n}, 0); }

void clock_checks(Suite& s) {
  s.check("clock: empty interval", [] { return ClockField(11, 1.0).site_events(0, 0.0).empty(); });
  s.check("clock: repeated query", [] {
    ClockField a(5, 3.0), b(5, 3.0);
    return a.site_events(2, 3.0) == b.site_events(2, 3.0) && a.site_events(2, 3.0) == b.site_events(2, 3.0);
  });
  s.check("clock: no event after the last", [] {
    ClockField c(3, 10.0);
    const auto ev = c.site_events(0, 10.0);
    return !ev.empty() && !c.next_event(0, ev.back());
  });
  s.check("clock: successor of an event", [] {
    ClockField c(4, 10.0);
    const auto ev = c.site_events(1, 10.0);
    return ev.size() >= 2 && c.next_event(1, ev[0]) == ev[1];
  });
  s.check("clock: empty stream", [] { return !ClockField(4, 0.0).next_event(0, 0.0); });
}

void dynamics_checks(Suite& s) {
  s.check("ic: half-2-periodic", [] {
    return materialize_ic({HalfPeriodicIC{2.0}, 3}, 0) == std::vector<Site>{0, -2, -4};
  });
  s.check("ic: half-1.5-periodic", [] {
    return materialize_ic({HalfPeriodicIC{1.5}, 4}, 0) == std::vector<Site>{0, -1, -3, -4};
  });
  s.check("wall: zero function", [] {
    const WallSpec w = WallSpec::right_wall(PiecewiseFn{});
    return eval_wall(w, 0.0) == 0.0 && eval_wall(w, 7.5) == 0.0;
  });
  s.check("simulate: one admissible jump", [] {
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      ClockField c(seed, 1.0);
      const auto e0 = c.site_events(0, 1.0);
      if (e0.size() != 1) continue;
      const auto t0 = e0.front();
      if (c.next_event(1, t0) || c.next_event(-1, t0)) continue;
      const Trajectory tr = simulate(step_positions(4), WallSpec::none(), 1.0, c);
      return tr.final_position(1) == 1 && tr.final_position(2) == -1 && tr.final_position(3) == -2 &&
             tr.final_position(4) == -3 && tr.jump_times(1).size() == 1 && tr.jump_times(1)[0] == t0;
    }
    return false;
  });
  s.check("simulate: zero wall pins particle 1", [] {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ClockField c(seed, 5.0);
      const Trajectory tr = simulate(step_positions(5), WallSpec::right_wall(PiecewiseFn{}), 5.0, c);
      if (!tr.jump_times(1).empty()) return false;
    }
    return true;
  });
  s.check("trajectory: position lookup", [] {
    ClockField c(21, 6.0);
    const Trajectory tr = simulate(materialize_ic({HalfPeriodicIC{3.0}, 3}, 0), WallSpec::none(), 6.0, c);
    for (std::size_t label = 1; label <= tr.size(); ++label) {
      const auto jumps = tr.jump_times(label);
      const Site x0 = tr.initial_positions()[label - 1];
      if (tr.position_at(label, 0.0) != x0) return false;
      if (tr.position_at(label, 6.0) != tr.final_position(label)) return false;
      if (tr.final_position(label) != x0 + static_cast<Site>(jumps.size())) return false;
      for (std::size_t k = 0; k + 1 < jumps.size(); ++k) {
        const double mid = 0.5 * (jumps[k] + jumps[k + 1]);
        if (tr.position_at(label, mid) != x0 + static_cast<Site>(k) + 1) return false;
      }
    }
    return true;
  });
}

void multispecies_checks(Suite& s) {
  s.check("swap: ascending pair exchanges", [] {
    PermutationConfig cfg = PermutationConfig::identity(-3, 3);
    return cfg.swap(0) && cfg.colour_at(0) == 1 && cfg.colour_at(1) == 0;
  });
  s.check("swap: descending pair stays", [] {
    PermutationConfig cfg = PermutationConfig::from_colours(0, {5, 2, 0, 1, 3, 4});
    return !cfg.swap(0) && cfg.colour_at(0) == 5 && cfg.colour_at(1) == 2;
  });
  s.check("swap: second application is a no-op", [] {
    const PermutationConfig once = apply_swap(PermutationConfig::identity(-2, 2), 0);
    return apply_swap(once, 0) == once;
  });
  s.check("invert: identity", [] { return invert(PermutationConfig::identity(-4, 4)) == PermutationConfig{}; });
  s.check("invert: transposition", [] {
    const PermutationConfig t = apply_swap(PermutationConfig::identity(-2, 2), 0);
    return invert(t) == t;
  });
  s.check("invert: involution", [] {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 50; ++k) {
      std::vector<Site> seq(12);
      for (auto& z : seq) z = std::uniform_int_distribution<Site>(-5, 5)(rng);
      const PermutationConfig cfg = apply_sequence(seq);
      if (!(invert(invert(cfg)) == cfg)) return false;
    }
    return true;
  });
  s.check("simulate_multi: no events", [] {
    ClockField c(1, 0.0);
    const PermutationConfig id = PermutationConfig::identity(-5, 5);
    return simulate_multi(id, {}, 0.0, c) == id;
  });
  s.check("simulate_multi: nothing admissible", [] {
    ClockField c(1, 5.0);
    const PermutationConfig cfg = apply_sequence(std::vector<Site>{0, 1, -1});
    PermutationConfig wide = cfg;
    wide.ensure(-5, 5);
    return simulate_multi(wide, [](Site, double) { return false; }, 5.0, c) == cfg;
  });
  s.check("marginal: identity", [] {
    const Occupancy occ = marginal(PermutationConfig::identity(-3, 3), 0);
    for (Site z = -8; z <= 8; ++z) {
      if (occ.contains(z) != (z <= 0)) return false;
    }
    return true;
  });
  s.check("marginal: cutoff below the window", [] {
    const Occupancy occ = marginal(PermutationConfig::identity(0, 5), -3);
    for (Site z = -8; z <= 8; ++z) {
      if (occ.contains(z) != (z <= -3)) return false;
    }
    return true;
  });
  s.check("marginal: after one swap", [] {
    const Occupancy occ = marginal(apply_swap(PermutationConfig::identity(-3, 3), 0), 0);
    return occ.contains(-1) && !occ.contains(0) && occ.contains(1) && !occ.contains(2);
  });
  s.check("pi: step is the identity", [] {
    const PiConstruction pi = build_pi(step_positions(6));
    return pi.swaps.empty() && pi.pi_id == PermutationConfig{};
  });
  s.check("colour-position: empty word", [] { return colour_position_check({}); });
  s.check("colour-position: single swap", [] { return colour_position_check(std::vector<Site>{3}); });
  s.check("exchange: two-site core", [] {
    const bool occ[2] = {true, false};
    return exchange_check(occ, 0, 1, 0) == ExchangeOutcome::holds;
  });
  s.check("exchange: hypothesis not met", [] {
    const bool occ[3] = {true, true, true};
    return exchange_check(occ, 0, 2, 0) == ExchangeOutcome::hypothesis_not_met;
  });
}

void identity_checks(Suite& s) {
  const PiecewiseFn zero;
  s.check("margin: s = 0 never clears", [&] {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ClockField c(seed, 1.0);
      if (wall_margin_infimum(simulate(step_positions(1), WallSpec::none(), 1.0, c), 1, zero, 1.0, 0) > 0) {
        return false;
      }
    }
    return true;
  });
  s.check("margin: s = -1 always clears", [&] {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ClockField c(seed, 1.0);
      if (wall_margin_infimum(simulate(step_positions(1), WallSpec::none(), 1.0, c), 1, zero, 1.0, -1) < 1) {
        return false;
      }
    }
    return true;
  });
  s.check("margin: constant path", [] {
    ClockField c(2, 3.0);
    const Trajectory tr = simulate(step_positions(1), WallSpec::right_wall(PiecewiseFn{}), 3.0, c);
    return wall_margin_infimum(tr, 1, PiecewiseFn::linear(2.0), 3.0, -4) == 4;
  });
  s.check("rhs indicator: s = -1 true, s = 0 false", [&] {
    const auto ic = step_positions(1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ClockField c(seed, 1.0);
      const Trajectory tr = simulate(ic, WallSpec::none(), 1.0, c);
      if (!wall_identity_rhs_indicator(tr, ic, &zero, 1, -1, 1.0)) return false;
      if (wall_identity_rhs_indicator(tr, ic, &zero, 1, 0, 1.0)) return false;
    }
    return true;
  });
  s.check("identity estimate: degenerate probabilities", [&] {
    const std::vector<Site> sv{-1, 0};
    const auto r = estimate_wall_identity({StepIC{0}, 1}, &zero, 1, 1.0, sv, {2000, 3, 1, 0.99});
    return r[0].lhs.p == 1.0 && r[0].rhs.p == 1.0 && r[1].lhs.p == 0.0 && r[1].rhs.p == 0.0;
  });
  s.check("envelope: one particle", [] {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ClockField c(seed, 2.0);
      if (!envelope_pathwise(std::vector<Site>{-3}, 1, 2.0, c)) return false;
    }
    return true;
  });
  s.check("envelope: step", [] {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ClockField c(seed, 2.0);
      if (!envelope_pathwise(step_positions(4), 4, 2.0, c)) return false;
    }
    return true;
  });
  s.check("shifted minimum: single label", [] {
    const std::vector<std::size_t> labels{1};
    const std::vector<Site> Z{0};
    return shifted_minimum_mc(labels, Z, 1.0, 0, {2000, 5, 1, 0.99}).verdict;
  });
  s.check("shifted minimum: common shift", [] {
    const std::vector<std::size_t> labels{1, 2};
    const std::vector<Site> Z{2, 2};
    return shifted_minimum_mc(labels, Z, 1.0, 1, {2000, 6, 1, 0.99}).verdict;
  });
  s.check("variational: step", [] {
    const std::vector<Site> sv{-2, -1, 0};
    for (const auto& r : variational_onepoint_estimate({StepIC{0}, 3}, 3, 1.0, sv, {2000, 7, 1, 0.99})) {
      if (!r.verdict) return false;
    }
    return true;
  });
}

void asymptotic_checks(Suite& s) {
  s.check("f0: branch continuity", [] {
    const double a = 0.2, xi = 0.3;
    return close(f0(1.0 - a, a, xi), xi + a) && close(f0(std::nextafter(1.0 - a, 0.0), a, xi), xi + a, 1e-7);
  });
  s.check("f0: direct value", [] { return close(f0(0.0, 0.25, 0.0), 0.0); });
  s.check("constants: alpha_i = 1", [] { return close(scaling_constants(0.25, 1.0).c1, std::pow(2.0, -1.0 / 3.0)); });
  s.check("mu: tau = 0", [] {
    const double a = 0.1, ai = 0.4, T = 50.0;
    return close(mu(a, ai, 0.0, T), std::sqrt(ai) * (std::sqrt(ai) - 2.0 * std::sqrt(a)) * T);
  });
  s.check("g_T: linear in the wall", [] {
    const double T = 200.0, delta = 0.75;
    const auto ctx = ScalingContext::make(0.1, 11.0 / 30.0, {0.4});
    const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
    const PiecewiseFn f = PiecewiseFn::demo_wall(T);
    const auto g1 = wall_to_gT(f, ctx, 0, T, grid);
    const auto g2 = wall_to_gT(f.shifted(delta * ctx.wall(0).c1 * std::cbrt(T)), ctx, 0, T, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!close(g2.g[k] - g1.g[k], delta, 1e-9)) return false;
    }
    return true;
  });
  s.check("y_T: periodic initial condition", [] {
    const auto ic = materialize_ic({HalfPeriodicIC{2.0}, 400}, 0);
    const std::vector<double> grid{0.0, 0.5, 1.0};
    for (double y : ic_to_yT(ic, YMode::tagged, 0.25, 2.0, 1000.0, grid)) {
      if (y != 0.0) return false;
    }
    return true;
  });
  s.check("g_alpha: d = 2 seam", [] {
    return close(g_alpha_periodic(2.0, 0.25), 0.0) && close(g_alpha_periodic(2.0, std::nextafter(0.25, 1.0)), 0.0);
  });
  s.check("g_alpha: d = 1", [] {
    return close(g_alpha_periodic(1.0, 0.25), 0.0) && close(g_alpha_periodic(1.0, 1.0 / 16.0), 0.5);
  });
  s.check("profile: d = 2 at the origin", [] { return close(density_profile_periodic(0.0, 100.0, 2.0), 0.5); });
  s.check("profile: d = 4 plateau", [] { return close(density_profile_periodic(-100.0, 100.0, 4.0), 0.25); });
  s.check("shock: coincident times", [] {
    const auto d = shock_densities(0.3, 0.3, 0.3);
    return close(d.right, 1.0) && close(d.left_bound, 1.0);
  });
  s.check("shock: alpha_0 = 1", [] { return close(shock_densities(0.25, 1.0, 1.0).right, 0.5); });
  s.check("shock: left bound", [] { return close(shock_densities(0.09, 0.09, 0.36).left_bound, 0.5); });
  s.check("alpha_d: d = 4", [] { return close(demo_wall_alpha_d(4.0), 11.0 / 120.0); });
  s.check("rescale: centre maps to 0", [] { return rescale_tagged(0.3 * 64.0, 0.3, 64.0) == 0.0; });
  s.check("rescale: fixed time centre", [] {
    std::vector<Site> x(100);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = 99 - static_cast<Site>(k);
    const std::vector<double> grid{0.0};
    return rescale_fixed_time(x, 0.25, 400.0, grid)[0] == 0.0;
  });
}

void stats_checks(Suite& s) {
  s.check("ecdf: point mass", [] {
    const Ecdf e({0.0});
    return e(-1e-9) == 0.0 && e(0.0) == 1.0 && e(5.0) == 1.0;
  });
  s.check("ecdf: duplicates", [] { return close(Ecdf({1.0, 1.0, 2.0})(1.0), 2.0 / 3.0); });
  s.check("ks: identical", [] { return ks_distance(Ecdf({1.0, 2.0, 3.0}), Ecdf({1.0, 2.0, 3.0})) == 0.0; });
  s.check("ks: disjoint points", [] { return ks_distance(Ecdf({0.0}), Ecdf({1.0})) == 1.0; });
  s.check("wilson: k = 0", [] { return wilson_ci(0, 25).lo == 0.0; });
  s.check("wilson: k = n", [] { return wilson_ci(25, 25).hi == 1.0; });
  s.check("density: packed block", [] {
    const auto p = empirical_density({step_positions(10)}, 5, -9, 0);
    return p.density.size() == 2 && p.density[0] == 1.0 && p.density[1] == 1.0;
  });
  s.check("density: empty region", [] {
    const auto p = empirical_density({step_positions(10)}, 5, 10, 19);
    return p.density.size() == 2 && p.density[0] == 0.0 && p.density[1] == 0.0;
  });
  s.check("decoupling: degenerate component", [] {
    const Ecdf lhs({1.0, 2.0, 3.0}), c1({1.0, 2.0, 3.0});
    const Ecdf c2({std::numeric_limits<double>::infinity()});
    const std::vector<double> grid{0.0, 1.5, 2.5, 4.0};
    return decoupling_check(lhs, c1, c2, grid) == 0.0;
  });
}

void runner_checks(Suite& s) {
  s.check("runner: simulate is deterministic", [] {
    const json cfg = json::parse(R"({"experiment":"simulate","ic":{"type":"step"},"T":10,"n":20})");
    const auto a = run_experiment(cfg, {7, std::nullopt, 1});
    const auto b = run_experiment(cfg, {7, std::nullopt, 1});
    return a.artifacts.size() == b.artifacts.size() && a.artifacts[0].data == b.artifacts[0].data &&
           a.artifacts[0].name == b.artifacts[0].name;
  });
  s.check("runner: identity on a degenerate case", [] {
    const json cfg = json::parse(
        R"({"experiment":"verify-identity","samples":2000,
            "cases":[{"ic":{"type":"step"},"wall":{"breakpoints":[[0,0]]},"n":1,"T":1,"s":[-1]}]})");
    const auto r = run_experiment(cfg, {});
    const auto& rec = r.report["records"][0];
    return r.verified && rec["p_lhs"] == 1.0 && rec["p_rhs"] == 1.0;
  });
}

}  // namespace

RunResult run_selfcheck() {
  Suite s;
  clock_checks(s);
  dynamics_checks(s);
  multispecies_checks(s);
  identity_checks(s);
  asymptotic_checks(s);
  stats_checks(s);
  runner_checks(s);
  RunResult out;
  out.verified = s.all();
  out.report["checks"] = s.records();
  return out;
}

}  // namespace excluwall
