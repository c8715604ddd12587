#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "excluwall/dynamics.hpp"
#include "excluwall/stats.hpp"

namespace excluwall {

/// Integer margin of the wall clause on a step-IC path:
///   M = min over t in [0,T] of x_n(t) + floor(f(T - t)).
/// The clause "x_n(t) + floor(f(T-t)) > s for all t" holds iff M > s. On the
/// k-th constancy interval [tau_k, tau_{k+1}) of x_n the minimum sits at the
/// right end (f(T - .) is nonincreasing), so M is a minimum over jump times.
/// Without a wall (f absent) the margin is +inf, encoded as the max Site.
Site wall_margin(const Trajectory& traj, std::size_t n, const PiecewiseFn* f, double T);

// M - s. The wall clause holds iff the result is > 0.
Site wall_margin_infimum(const Trajectory& traj, std::size_t n, const PiecewiseFn& f, double T,
                         Site s);

// min over j = 0..n-1 of x_{n-j}(T) + ic_{1+j}.
Site envelope_minimum(const Trajectory& traj, std::span<const Site> ic, std::size_t n);

bool wall_identity_rhs_indicator(const Trajectory& traj_step, std::span<const Site> ic,
                             const PiecewiseFn* f, std::size_t n, Site s, double T);

struct Proportion {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double p = 0.0;
  Interval ci;
};

Proportion proportion(std::uint64_t hits, std::uint64_t trials, double level = 0.99);

struct TwoSidedReport {
  Site s = 0;
  Proportion lhs;
  Proportion rhs;
  bool verdict = false;  // Wilson intervals overlap
};

TwoSidedReport compare(Site s, const Proportion& lhs, const Proportion& rhs);

struct SamplingOptions {
  std::size_t samples = 100000;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;
  double level = 0.99;
};

/// Random streams used by the two-sided estimators.
enum Stream : std::uint64_t { stream_lhs = 0, stream_rhs = 1, stream_ic = 2 };

// x^f_n(T) for the wall-constrained process with IC `ic` (f absent: no wall).
std::vector<Site> sample_wall_positions(const InitialConditionSpec& ic, const PiecewiseFn* f,
                                        std::size_t n, double T, const SamplingOptions& opt);

// min(M, V) from independent step-IC runs and independently drawn ICs:
// P(min(M, V) > s) is the right side of the finite-time identity.
std::vector<Site> sample_wall_identity_rhs(const InitialConditionSpec& ic, const PiecewiseFn* f,
                                       std::size_t n, double T, const SamplingOptions& opt);

// P(X > s) for each s from integer samples.
std::vector<Proportion> survival(std::span<const Site> samples, std::span<const Site> s_values,
                                 double level = 0.99);

std::vector<TwoSidedReport> estimate_wall_identity(const InitialConditionSpec& ic, const PiecewiseFn* f,
                                               std::size_t n, double T,
                                               std::span<const Site> s_values,
                                               const SamplingOptions& opt);

/// Shared-clock check of x~_n(T) = min_j x^{step, ic_{1+j}}_{n-j}(T).
bool envelope_pathwise(std::span<const Site> ic, std::size_t n, double T, ClockField& clocks);

/// P(min_{i} x^{step,Z_i}_{label_i}(T) <= s) (shared clocks) against
/// P(min_i x_{label_i}(T) + Z_i <= s) (one step run).
TwoSidedReport shifted_minimum_mc(std::span<const std::size_t> labels, std::span<const Site> Z, double T,
                          Site s, const SamplingOptions& opt);

/// P(x~_n(T) > s) directly against P(min_j x_{n-j}(T) + ic_{1+j} > s).
std::vector<TwoSidedReport> variational_onepoint_estimate(const InitialConditionSpec& ic,
                                                          std::size_t n, double T,
                                                          std::span<const Site> s_values,
                                                          const SamplingOptions& opt);

}  // namespace excluwall
