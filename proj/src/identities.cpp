#include "excluwall/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "excluwall/replicas.hpp"

namespace excluwall {

namespace {

constexpr Site kInfinite = std::numeric_limits<Site>::max();

Site floor_site(double v) {
  if (v >= 9.0e18) return kInfinite;
  return static_cast<Site>(std::floor(v));
}

struct Workspace {
  ClockField clocks;
  Trajectory traj;
  std::vector<Site> positions;
};

std::vector<Site> step_positions(Site offset, std::size_t n) {
  return materialize_ic({StepIC{offset}, n}, 0);
}

void check_label(std::size_t n) {
  if (n < 1) throw PreconditionError("label must be at least 1");
}

}  // namespace

Site wall_margin(const Trajectory& traj, std::size_t n, const PiecewiseFn* f, double T) {
  check_label(n);
  if (n > traj.size()) throw RangeError("label exceeds simulated particles");
  if (traj.horizon() < T) throw PreconditionError("trajectory horizon shorter than T");
  if (f == nullptr) return kInfinite;
  const auto jumps = traj.jump_times(n);
  Site x = traj.initial_positions()[n - 1];
  Site m = kInfinite;
  for (double tau : jumps) {
    if (tau > T) break;
    const Site v = floor_site((*f)(T - tau));
    if (v != kInfinite) m = std::min(m, x + v);
    ++x;
  }
  const Site v = floor_site((*f)(0.0));
  if (v != kInfinite) m = std::min(m, x + v);
  return m;
}

Site wall_margin_infimum(const Trajectory& traj, std::size_t n, const PiecewiseFn& f, double T,
                         Site s) {
  return wall_margin(traj, n, &f, T) - s;
}

Site envelope_minimum(const Trajectory& traj, std::span<const Site> ic, std::size_t n) {
  check_label(n);
  if (n > traj.size() || n > ic.size()) throw RangeError("not enough labels for the envelope");
  Site v = kInfinite;
  for (std::size_t j = 0; j < n; ++j) v = std::min(v, traj.final_position(n - j) + ic[j]);
  return v;
}

bool wall_identity_rhs_indicator(const Trajectory& traj_step, std::span<const Site> ic,
                             const PiecewiseFn* f, std::size_t n, Site s, double T) {
  if (traj_step.horizon() != T) throw PreconditionError("step trajectory must end at T");
  return std::min(wall_margin(traj_step, n, f, T), envelope_minimum(traj_step, ic, n)) > s;
}

Proportion proportion(std::uint64_t hits, std::uint64_t trials, double level) {
  Proportion p;
  p.hits = hits;
  p.trials = trials;
  p.p = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  p.ci = wilson_ci(hits, trials, level);
  return p;
}

TwoSidedReport compare(Site s, const Proportion& lhs, const Proportion& rhs) {
  TwoSidedReport r;
  r.s = s;
  r.lhs = lhs;
  r.rhs = rhs;
  r.verdict = lhs.ci.lo <= rhs.ci.hi && rhs.ci.lo <= lhs.ci.hi;
  return r;
}

std::vector<Site> sample_wall_positions(const InitialConditionSpec& ic, const PiecewiseFn* f,
                                        std::size_t n, double T, const SamplingOptions& opt) {
  check_label(n);
  const WallSpec wall = f ? WallSpec::right_wall(*f) : WallSpec::none();
  InitialConditionSpec spec = ic;
  spec.n_max = n;
  const bool random = spec.is_random();
  const std::vector<Site> fixed = random ? std::vector<Site>{} : materialize_ic(spec, 0);
  return run_replicas<Workspace, Site>(opt.samples, opt.threads, [&](std::size_t i, Workspace& ws) {
    if (random) ws.positions = materialize_ic(spec, replica_seed(opt.base_seed, stream_ic, 2 * i));
    ws.clocks.reset(replica_seed(opt.base_seed, stream_lhs, i), T);
    simulate_into(ws.traj, random ? ws.positions : fixed, wall, T, ws.clocks);
    return ws.traj.final_position(n);
  });
}

std::vector<Site> sample_wall_identity_rhs(const InitialConditionSpec& ic, const PiecewiseFn* f,
                                       std::size_t n, double T, const SamplingOptions& opt) {
  check_label(n);
  InitialConditionSpec spec = ic;
  spec.n_max = n;
  const bool random = spec.is_random();
  const std::vector<Site> fixed = random ? std::vector<Site>{} : materialize_ic(spec, 0);
  const std::vector<Site> step = step_positions(0, n);
  return run_replicas<Workspace, Site>(opt.samples, opt.threads, [&](std::size_t i, Workspace& ws) {
    if (random) ws.positions = materialize_ic(spec, replica_seed(opt.base_seed, stream_ic, 2 * i + 1));
    ws.clocks.reset(replica_seed(opt.base_seed, stream_rhs, i), T);
    simulate_into(ws.traj, step, WallSpec::none(), T, ws.clocks);
    const auto& u = random ? ws.positions : fixed;
    return std::min(wall_margin(ws.traj, n, f, T), envelope_minimum(ws.traj, u, n));
  });
}

std::vector<Proportion> survival(std::span<const Site> samples, std::span<const Site> s_values,
                                 double level) {
  std::vector<Site> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Proportion> out;
  out.reserve(s_values.size());
  for (Site s : s_values) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), s);
    out.push_back(proportion(static_cast<std::uint64_t>(above), sorted.size(), level));
  }
  return out;
}

std::vector<TwoSidedReport> estimate_wall_identity(const InitialConditionSpec& ic, const PiecewiseFn* f,
                                               std::size_t n, double T,
                                               std::span<const Site> s_values,
                                               const SamplingOptions& opt) {
  if (opt.samples < 100) throw PreconditionError("at least 100 samples required");
  const auto lhs = survival(sample_wall_positions(ic, f, n, T, opt), s_values, opt.level);
  const auto rhs = survival(sample_wall_identity_rhs(ic, f, n, T, opt), s_values, opt.level);
  std::vector<TwoSidedReport> out;
  for (std::size_t k = 0; k < s_values.size(); ++k) out.push_back(compare(s_values[k], lhs[k], rhs[k]));
  return out;
}

bool envelope_pathwise(std::span<const Site> ic, std::size_t n, double T, ClockField& clocks) {
  check_label(n);
  if (n > ic.size()) throw PreconditionError("label exceeds initial condition length");
  const std::vector<Site> u(ic.begin(), ic.begin() + static_cast<std::ptrdiff_t>(n));
  const Site direct = simulate(u, WallSpec::none(), T, clocks).final_position(n);
  Site envelope = kInfinite;
  for (std::size_t j = 0; j < n; ++j) {
    const Trajectory shifted = simulate(step_positions(u[j], n - j), WallSpec::none(), T, clocks);
    envelope = std::min(envelope, shifted.final_position(n - j));
  }
  return direct == envelope;
}

TwoSidedReport shifted_minimum_mc(std::span<const std::size_t> labels, std::span<const Site> Z, double T,
                          Site s, const SamplingOptions& opt) {
  if (labels.empty() || labels.size() != Z.size()) {
    throw PreconditionError("shifted_minimum_mc: labels and shifts must be nonempty and of equal length");
  }
  const std::size_t top = *std::max_element(labels.begin(), labels.end());
  check_label(*std::min_element(labels.begin(), labels.end()));
  const auto lhs = run_replicas<Workspace, Site>(opt.samples, opt.threads, [&](std::size_t i, Workspace& ws) {
    ws.clocks.reset(replica_seed(opt.base_seed, stream_lhs, i), T);
    Site v = kInfinite;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      simulate_into(ws.traj, step_positions(Z[k], labels[k]), WallSpec::none(), T, ws.clocks);
      v = std::min(v, ws.traj.final_position(labels[k]));
    }
    return v;
  });
  const std::vector<Site> step = step_positions(0, top);
  const auto rhs = run_replicas<Workspace, Site>(opt.samples, opt.threads, [&](std::size_t i, Workspace& ws) {
    ws.clocks.reset(replica_seed(opt.base_seed, stream_rhs, i), T);
    simulate_into(ws.traj, step, WallSpec::none(), T, ws.clocks);
    Site v = kInfinite;
    for (std::size_t k = 0; k < labels.size(); ++k) v = std::min(v, ws.traj.final_position(labels[k]) + Z[k]);
    return v;
  });
  auto at_most = [&](const std::vector<Site>& xs) {
    return proportion(static_cast<std::uint64_t>(std::count_if(xs.begin(), xs.end(), [&](Site v) { return v <= s; })),
                      xs.size(), opt.level);
  };
  return compare(s, at_most(lhs), at_most(rhs));
}

std::vector<TwoSidedReport> variational_onepoint_estimate(const InitialConditionSpec& ic,
                                                          std::size_t n, double T,
                                                          std::span<const Site> s_values,
                                                          const SamplingOptions& opt) {
  if (opt.samples < 100) throw PreconditionError("at least 100 samples required");
  return estimate_wall_identity(ic, nullptr, n, T, s_values, opt);
}

}  // namespace excluwall
