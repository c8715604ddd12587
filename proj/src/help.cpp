#include <map>
#include <string>

#include "excluwall/experiments.hpp"

namespace excluwall {

namespace {

constexpr const char* kCommon = R"(Common keys:
  experiment   string   subcommand name (required)
  seed         uint     base seed (default 0; --seed and EXCLUWALL_SEED override)
  samples      uint     sample/replica count (--samples overrides)

Initial conditions ("ic"):
  {"type":"step","offset":k}              x_n = k - (n-1)
  {"type":"explicit","sites":[...]}       strictly decreasing positions
  {"type":"half_periodic","d":d}          x_n = -floor(d (n-1)), d >= 1
  {"type":"half_bernoulli","rho":r}       x_1 = 0, sites < 0 occupied w.p. r
  {"type":"stationary","rho":r,"window":w}

Walls ("wall"):
  absent or "none"                        no wall
  {"breakpoints":[[t,v],[t,v,jump],...],"tail_slope":s}
                                          first knot [0,0]; v is the right value
  {"preset":"demo_wall","T":T}            slope 2/3, then T/15 + t/2 after 0.35T
)";

const std::map<std::string, std::string, std::less<>>& texts() {
  static const std::map<std::string, std::string, std::less<>> m = {
      {"simulate", R"(simulate: one trajectory or an ensemble of final configurations.
  ic, wall, T (horizon), n (particles), replicas (default 1)
Outputs:
  replicas = 1: simulate_trajectory_*.csv  label,jump_index,time,new_position
  replicas > 1: simulate_final_positions_*.csv  replica,label,position
)"},
      {"verify-identity", R"(verify-identity: two-sided estimate of P(x^f_n(T) > s) against the
step-process representation, Wilson intervals compared per s.
  cases   [{ic, wall, n, T, s:[...]}, ...]
  grid    "standard" adds the 81-configuration grid
  level   confidence level (default 0.99)
  samples per side (default 100000)
Outputs:
  verify-identity_identity_*.csv
    case,n,T,s,p_lhs,ci_lhs_lo,ci_lhs_hi,p_rhs,ci_rhs_lo,ci_rhs_hi,n_samples,verdict
)"},
      {"verify-coupling", R"(verify-coupling: shared-clock representations.
  checks  array of
    {"kind":"envelope","trials":N,"n_max":k,"T_max":t}  exact pathwise check
    {"kind":"shifted_minimum","labels":[...],"Z":[...],"T":t,"s":s} two-sided estimate
    {"kind":"variational","ic":{...},"n":n,"T":t,"s":[...]} two-sided estimate
  level   confidence level (default 0.99)
  samples per side (default 100000)
Outputs: report JSON only.
)"},
      {"colour-position", R"(colour-position: exact checks on permutation dynamics.
  sequences           random swap words (default 10000)
  max_length          word length bound (default 12)
  window              [lo, hi] swap-site range (default [-6, 6])
  exchange_max_width  exhaustive exchange widths b - a (default 8)
  pi_trials           random initial conditions for the pi construction (default 1000)
  pi_max_n            particle bound for pi_trials (default 12)
  marginal_cases      shared-clock marginal checks (default 100)
  T_max               horizon bound for marginal cases (default 4)
Outputs: report JSON only.
)"},
      {"density", R"(density: ensemble density against the hydrodynamic profile.
  ic, wall, T
  bin_width      sites per bin (default 25)
  region         [lo, hi] (default [-T, T])
  margin_factor  bins within margin_factor T^{2/3} of a profile kink are not scored (default 3)
  tolerance      sup error bound (default 0.05)
  probe          {"alpha":a}: densities left/right of particle aT over T^{2/3} windows
  samples        replicas (default 200)
Outputs:
  density_density_*.csv  bin_lo,bin_hi,centre,density,predicted,scored
)"},
      {"fluctuations", R"(fluctuations: rescaled tagged-particle samples.
  mode    "tagged" | "fixed_time" | "tail" | "decoupling"
  ic      default step
  wall, T (list for decoupling), alpha
  xi      centring (default 1 - 2 sqrt(alpha); decoupling uses the regime table)
  tau     fixed_time grid
  s       tail thresholds (default [1,2,3,4])
  S_grid  decoupling grid in units of T^{1/3} (default -4..4 step 0.25)
  level   DKW level for decoupling (default 0.99)
  samples (default 10000)
Outputs:
  tagged:      fluctuations_tagged_*.csv      replica,S
  fixed_time:  fluctuations_fixed_time_*.csv  replica,tau,X
  decoupling:  fluctuations_decoupling_*.csv  T,S,s,surv_lhs,surv_comp1,surv_comp2
  tail:        report JSON only
)"},
      {"classify", R"(classify: regime table for the demo wall.
  d      1 (step), 2, 3 or >= 4 (half-d-periodic)
  alpha  number or list in (0,1)
Outputs: report JSON only (law, scales, xi, influence times, shock densities).
)"},
      {"selfcheck", R"(selfcheck: deterministic suite of elementary cases.
Outputs: report JSON only.
)"},
  };
  return m;
}

}  // namespace

const char* experiment_help(std::string_view experiment) {
  static const std::map<std::string, std::string, std::less<>> full = [] {
    std::map<std::string, std::string, std::less<>> out;
    for (const auto& [k, v] : texts()) out[k] = v + "\n" + kCommon;
    return out;
  }();
  const auto it = full.find(experiment);
  return it == full.end() ? nullptr : it->second.c_str();
}

}  // namespace excluwall
