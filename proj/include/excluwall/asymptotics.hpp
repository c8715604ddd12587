#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "excluwall/error.hpp"
#include "excluwall/piecewise.hpp"

namespace excluwall {

struct WallConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// (c1^i, c2^i) for a wall influence at time alpha_i T. Throws DomainError
// unless 0 < alpha < alpha_i <= 1.
WallConstants scaling_constants(double alpha, double alpha_i);

// mu^i(tau, T).
double mu(double alpha, double alpha_i, double tau, double T);

struct TaggedConstants {
  double c1 = 0.0;
  double c2_hat = 0.0;
};

// Tagged-particle constants for label alpha T:
// c1 = (1 - sqrt a)^{2/3} a^{-1/6}, c2_hat = 2 a^{2/3} (1 - sqrt a)^{1/3}.
TaggedConstants tagged_constants(double alpha);
// Constants of the d-periodic boundary: c1 = (1 - 1/d)^{2/3} d^{1/3},
// c2_hat = 2 d^{-4/3} (1 - 1/d)^{1/3}. Requires d > 1.
TaggedConstants periodic_constants(double d);

struct ScalingContext {
  double alpha = 0.0;
  std::optional<double> d;
  double xi = 0.0;
  std::vector<double> influence;  // alpha_0 < ... < alpha_n in (alpha, 1]

  // Validates the ordering and rejects degenerate alpha_i = alpha.
  static ScalingContext make(double alpha, double xi, std::vector<double> influence,
                             std::optional<double> d = std::nullopt);

  WallConstants wall(std::size_t i) const { return scaling_constants(alpha, influence.at(i)); }
  TaggedConstants tagged() const { return tagged_constants(alpha); }
};

// f0(beta) = xi - sqrt(1-beta)(sqrt(1-beta) - 2 sqrt(alpha)) for beta < 1 - alpha,
// xi + alpha otherwise.
double f0(double beta, double alpha, double xi);

struct GtSample {
  std::vector<double> tau;
  std::vector<double> g;
  // min over the grid of g - tau^2 / 2; the growth bound holds with M = -min_excess.
  double min_excess = 0.0;
};

// g_T^i(tau) = tau^2 - (xi T - mu^i - f((1-alpha_i) T + c2^i tau T^{2/3})) / (c1^i T^{1/3}).
// Grid points whose wall argument falls outside [0, inf) are rejected.
GtSample wall_to_gT(const PiecewiseFn& f, const ScalingContext& ctx, std::size_t i, double T,
                    std::span<const double> tau_grid);

enum class YMode { tagged, periodic_boundary };

// y_T on the grid. tagged: (x_{1+L} + d L) / (c1 T^{1/3}), L = floor(c2_hat tau T^{2/3}),
// with tagged_constants(alpha). periodic_boundary: label N = floor((alpha - d^{-2}) T
// + c2_hat tau T^{2/3}), value (x_N + d N) / (c1 T^{1/3}) with periodic_constants(d).
// Throws RangeError if a label is < 1 or beyond ic.
std::vector<double> ic_to_yT(std::span<const Site> ic, YMode mode, double alpha, double d, double T,
                             std::span<const double> tau_grid);

double g_alpha_periodic(double d, double alpha);
double density_profile_periodic(double x, double T, double d);

struct ShockDensities {
  double right = 0.0;
  double left_bound = 0.0;
};
ShockDensities shock_densities(double alpha, double alpha0, double alpha_n);

struct Regime {
  double xi = 0.0;
  std::string law;                   // "GOE", "GOE x GOE", "GUE", "F_2to1;0", "not tabulated"
  std::vector<double> scales;        // argument multipliers of S, one per factor
  std::vector<double> influence;     // wall influence times alpha_i of the regime
  bool tabulated = true;
};

// Regime table for the demo wall (slope 2/3, then T/15 + t/2
// after 0.35T). d = 1 is the step initial condition; d in {2, 3} or d >= 4 are
// half-d-periodic.
Regime demo_wall_classify(double d, double alpha);

// alpha_d = (13d - 30) / (30 (d - 2) d).
double demo_wall_alpha_d(double d);

// S = (xi T - x) / T^{1/3}.
double rescale_tagged(double x, double xi, double T);

// X_T(tau) from final positions (label 1 first) with floor-rounded labels.
std::vector<double> rescale_fixed_time(std::span<const Site> positions, double alpha, double T,
                                       std::span<const double> tau_grid);

}  // namespace excluwall
