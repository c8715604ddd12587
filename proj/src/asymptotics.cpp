#include "excluwall/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace excluwall {

namespace {

constexpr double kTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kTol * std::max(1.0, std::abs(b)); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

// c1(alpha) of the unconstrained step process.
double c1_step(double alpha) { return std::pow(1.0 - std::sqrt(alpha), 2.0 / 3.0) * std::pow(alpha, -1.0 / 6.0); }

Regime step_table(double alpha) {
  Regime r;
  const double goe_early = std::cbrt(2.0 / alpha);
  const double goe_late = 1.0 / std::cbrt(3.0 * alpha);
  if (alpha < 0.1 && !near(alpha, 0.1)) {
    r.xi = 17.0 / 30.0 - 2.0 * alpha;
    r.law = "GOE";
    r.scales = {goe_early};
    r.influence = {4.0 * alpha};
  } else if (near(alpha, 0.1)) {
    r.xi = 17.0 / 30.0 - 2.0 * alpha;
    r.law = "GOE x GOE";
    r.scales = {goe_early, goe_late};
    r.influence = {4.0 * alpha, 9.0 * alpha};
  } else if (alpha < 1.0 / 9.0 && !near(alpha, 1.0 / 9.0)) {
    r.xi = 2.0 / 3.0 - 3.0 * alpha;
    r.law = "GOE";
    r.scales = {goe_late};
    r.influence = {9.0 * alpha};
  } else if (near(alpha, 1.0 / 9.0)) {
    r.xi = 1.0 / 3.0;
    r.law = "F_2to1;0";
    r.scales = {std::pow(2.0, -2.0 / 3.0) * std::cbrt(3.0)};
    r.influence = {1.0};
  } else {
    r.xi = 1.0 - 2.0 * std::sqrt(alpha);
    r.law = "GUE";
    r.scales = {1.0 / c1_step(alpha)};
  }
  return r;
}

double periodic_goe_scale(double d) {
  return std::pow(2.0, 2.0 / 3.0) * std::pow(1.0 - 1.0 / d, -2.0 / 3.0) * std::pow(d, -1.0 / 3.0);
}

}  // namespace

WallConstants scaling_constants(double alpha, double alpha_i) {
  check_alpha(alpha);
  if (!(alpha_i > alpha && alpha_i <= 1.0)) {
    throw DomainError("influence time must satisfy alpha < alpha_i <= 1");
  }
  const double gap = std::sqrt(alpha_i) - std::sqrt(alpha);
  WallConstants c;
  c.c1 = std::pow(alpha, -1.0 / 6.0) * std::pow(alpha_i, 1.0 / 6.0) * std::pow(gap, 2.0 / 3.0);
  c.c2 = 2.0 * std::pow(alpha, -1.0 / 3.0) * std::pow(alpha_i, 5.0 / 6.0) * std::cbrt(gap);
  return c;
}

double mu(double alpha, double alpha_i, double tau, double T) {
  scaling_constants(alpha, alpha_i);
  const double gap = std::sqrt(alpha_i) - std::sqrt(alpha);
  return std::sqrt(alpha_i) * (std::sqrt(alpha_i) - 2.0 * std::sqrt(alpha)) * T -
         2.0 * tau * std::pow(alpha, -1.0 / 3.0) * std::cbrt(alpha_i) * std::pow(gap, 4.0 / 3.0) *
             std::pow(T, 2.0 / 3.0);
}

TaggedConstants tagged_constants(double alpha) {
  check_alpha(alpha);
  const double r = 1.0 - std::sqrt(alpha);
  return {c1_step(alpha), 2.0 * std::pow(alpha, 2.0 / 3.0) * std::cbrt(r)};
}

TaggedConstants periodic_constants(double d) {
  if (!(d > 1.0)) throw DomainError("periodic constants require d > 1");
  const double r = 1.0 - 1.0 / d;
  return {std::pow(r, 2.0 / 3.0) * std::cbrt(d), 2.0 * std::pow(d, -4.0 / 3.0) * std::cbrt(r)};
}

ScalingContext ScalingContext::make(double alpha, double xi, std::vector<double> influence,
                                    std::optional<double> d) {
  check_alpha(alpha);
  if (d && !(*d >= 1.0)) throw DomainError("d must be >= 1");
  for (std::size_t i = 0; i < influence.size(); ++i) {
    scaling_constants(alpha, influence[i]);
    if (i > 0 && !(influence[i] > influence[i - 1])) {
      throw DomainError("influence times must increase strictly");
    }
  }
  return {alpha, d, xi, std::move(influence)};
}

double f0(double beta, double alpha, double xi) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0,1]");
  check_alpha(alpha);
  if (beta < 1.0 - alpha) {
    const double r = std::sqrt(1.0 - beta);
    return xi - r * (r - 2.0 * std::sqrt(alpha));
  }
  return xi + alpha;
}

GtSample wall_to_gT(const PiecewiseFn& f, const ScalingContext& ctx, std::size_t i, double T,
                    std::span<const double> tau_grid) {
  if (!(T > 0.0)) throw DomainError("T must be positive");
  const WallConstants c = ctx.wall(i);
  const double alpha_i = ctx.influence.at(i);
  const double t13 = std::cbrt(T);
  const double t23 = t13 * t13;
  GtSample out;
  out.min_excess = std::numeric_limits<double>::infinity();
  for (double tau : tau_grid) {
    const double arg = (1.0 - alpha_i) * T + c.c2 * tau * t23;
    if (arg < 0.0) throw DomainError("grid point maps to a negative wall time");
    const double g = tau * tau - (ctx.xi * T - mu(ctx.alpha, alpha_i, tau, T) - f(arg)) / (c.c1 * t13);
    out.tau.push_back(tau);
    out.g.push_back(g);
    out.min_excess = std::min(out.min_excess, g - 0.5 * tau * tau);
  }
  return out;
}

std::vector<double> ic_to_yT(std::span<const Site> ic, YMode mode, double alpha, double d, double T,
                             std::span<const double> tau_grid) {
  if (!(T > 0.0)) throw DomainError("T must be positive");
  const TaggedConstants c = mode == YMode::tagged ? tagged_constants(alpha) : periodic_constants(d);
  const double t13 = std::cbrt(T);
  const double t23 = t13 * t13;
  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    double value = 0.0;
    if (mode == YMode::tagged) {
      const double L = std::floor(c.c2_hat * tau * t23);
      if (L < 0.0 || L + 1.0 > static_cast<double>(ic.size())) throw RangeError("y_T label out of range");
      value = static_cast<double>(ic[static_cast<std::size_t>(L)]) + d * L;
    } else {
      const double N = std::floor((alpha - 1.0 / (d * d)) * T + c.c2_hat * tau * t23);
      if (N < 1.0 || N > static_cast<double>(ic.size())) throw RangeError("y_T label out of range");
      value = static_cast<double>(ic[static_cast<std::size_t>(N) - 1]) + d * N;
    }
    out.push_back(value / (c.c1 * t13));
  }
  return out;
}

double g_alpha_periodic(double d, double alpha) {
  if (!(d >= 1.0)) throw DomainError("d must be >= 1");
  check_alpha(alpha);
  if (alpha <= 1.0 / (d * d)) return 1.0 - 2.0 * std::sqrt(alpha);
  return 1.0 - 1.0 / d - d * alpha;
}

double density_profile_periodic(double x, double T, double d) {
  if (!(T > 0.0)) throw DomainError("T must be positive");
  if (!(d >= 1.0)) throw DomainError("d must be >= 1");
  if (x <= (1.0 - 2.0 / d) * T) return 1.0 / d;
  if (x < T) return 0.5 * (1.0 - x / T);
  return 0.0;
}

ShockDensities shock_densities(double alpha, double alpha0, double alpha_n) {
  check_alpha(alpha);
  if (!(alpha <= alpha0 && alpha0 <= alpha_n && alpha_n <= 1.0)) {
    throw DomainError("shock densities need alpha <= alpha_0 <= alpha_n <= 1");
  }
  return {std::sqrt(alpha / alpha0), std::sqrt(alpha / alpha_n)};
}

double demo_wall_alpha_d(double d) {
  if (!(d > 2.0)) throw DomainError("alpha_d is defined for d > 2");
  return (13.0 * d - 30.0) / (30.0 * (d - 2.0) * d);
}

Regime demo_wall_classify(double d, double alpha) {
  check_alpha(alpha);
  const bool d1 = d == 1.0, d2 = d == 2.0, d3 = d == 3.0;
  if (d1) return step_table(alpha);
  if (d2) {
    if (alpha < 1.0 / 9.0 || near(alpha, 1.0 / 9.0)) return step_table(alpha);
    Regime r;
    r.xi = g_alpha_periodic(d, alpha);
    if (alpha < 0.25 && !near(alpha, 0.25)) {
      r.law = "GUE";
      r.scales = {1.0 / c1_step(alpha)};
    } else if (near(alpha, 0.25)) {
      r.law = "F_2to1;0";
      r.scales = {1.0 / c1_step(alpha)};
    } else {
      r.law = "GOE";
      r.scales = {periodic_goe_scale(d)};
    }
    return r;
  }
  if (d3) {
    if (alpha < 1.0 / 9.0 && !near(alpha, 1.0 / 9.0)) return step_table(alpha);
    Regime r;
    r.xi = g_alpha_periodic(d, alpha);
    r.law = "GOE";
    r.scales = {std::cbrt(3.0)};
    return r;
  }
  if (d >= 4.0) {
    const double ad = demo_wall_alpha_d(d);
    const double boundary = periodic_goe_scale(d);
    const double goe_early = std::cbrt(2.0 / alpha);
    Regime r;
    if (alpha < ad && !near(alpha, ad)) {
      r.xi = 17.0 / 30.0 - 2.0 * alpha;
      r.law = "GOE";
      r.scales = {goe_early};
      r.influence = {4.0 * alpha};
    } else if (near(alpha, ad)) {
      r.xi = g_alpha_periodic(d, alpha);
      r.law = "GOE x GOE";
      r.scales = {goe_early, boundary};
      r.influence = {4.0 * alpha};
    } else {
      r.xi = g_alpha_periodic(d, alpha);
      r.law = "GOE";
      r.scales = {boundary};
    }
    return r;
  }
  Regime r;
  r.law = "not tabulated";
  r.tabulated = false;
  r.xi = std::nan("");
  return r;
}

double rescale_tagged(double x, double xi, double T) {
  if (!(T > 0.0)) throw DomainError("T must be positive");
  return (xi * T - x) / std::cbrt(T);
}

std::vector<double> rescale_fixed_time(std::span<const Site> positions, double alpha, double T,
                                       std::span<const double> tau_grid) {
  if (!(T > 0.0)) throw DomainError("T must be positive");
  const TaggedConstants c = tagged_constants(alpha);
  const double t13 = std::cbrt(T);
  const double t23 = t13 * t13;
  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const double label = std::floor(alpha * T + c.c2_hat * tau * t23);
    if (label < 1.0 || label > static_cast<double>(positions.size())) {
      throw RangeError("X_T label out of range");
    }
    const double x = static_cast<double>(positions[static_cast<std::size_t>(label) - 1]);
    const double centre = (1.0 - 2.0 * std::sqrt(alpha)) * T - c.c2_hat * tau * t23 / std::sqrt(alpha);
    out.push_back((x - centre) / (-c.c1 * t13));
  }
  return out;
}

}  // namespace excluwall
