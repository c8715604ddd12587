#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "excluwall/clockfield.hpp"
#include "excluwall/error.hpp"
#include "excluwall/piecewise.hpp"

namespace excluwall {

// ---------------------------------------------------------------------------
// Initial conditions

struct StepIC {
  Site offset = 0;  // rightmost particle position
};
struct ExplicitIC {
  std::vector<Site> sites;  // strictly decreasing
};
struct HalfPeriodicIC {
  double d = 1.0;  // x_n = -floor(d (n-1)), d >= 1
};
// Particle 1 pinned at 0; each site < 0 occupied independently with probability rho.
struct HalfBernoulliIC {
  double rho = 0.5;
};
// Bernoulli(rho) product measure restricted to sites <= 0 (rightmost particle
// not pinned). `window` is the lattice extent the caller intends to observe;
// it does not change the law of the materialized positions.
struct StationaryIC {
  double rho = 0.5;
  Site window = 0;
};

struct InitialConditionSpec {
  std::variant<StepIC, ExplicitIC, HalfPeriodicIC, HalfBernoulliIC, StationaryIC> kind;
  std::size_t n_max = 1;

  bool is_random() const noexcept {
    return std::holds_alternative<HalfBernoulliIC>(kind) ||
           std::holds_alternative<StationaryIC>(kind);
  }
};

// First n_max positions, strictly decreasing. Deterministic variants ignore
// `seed`. Throws DomainError for d < 1 or rho outside (0,1).
std::vector<Site> materialize_ic(const InitialConditionSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Walls

enum class WallMode { none, right_wall, min_site };

/// Admissibility rule for jumps.
///
///  - none:       every jump onto an empty site is allowed.
///  - right_wall: particle 1 may jump z -> z+1 only if z+1 <= f(t).
///  - min_site:   a particle at z may jump only if z >= m(t), with
///                m(t) = offset - f(reverse_time - t).
class WallSpec {
 public:
  WallSpec() = default;  // mode none

  static WallSpec none() { return {}; }
  // Requires f(0) = 0.
  static WallSpec right_wall(PiecewiseFn f);
  static WallSpec min_site(PiecewiseFn f, double offset, double reverse_time);

  WallMode mode() const noexcept { return mode_; }
  const PiecewiseFn& function() const noexcept { return f_; }
  double offset() const noexcept { return offset_; }
  double reverse_time() const noexcept { return reverse_time_; }

  // right_wall: f(t); none: +inf; min_site: m(t).
  double value(double t) const;

  bool admits(std::size_t label, Site z, double t) const {
    switch (mode_) {
      case WallMode::none:
        return true;
      case WallMode::right_wall:
        return label != 1 || static_cast<double>(z + 1) <= f_(t);
      case WallMode::min_site:
        return static_cast<double>(z) >= offset_ - f_(reverse_time_ - t);
    }
    return true;
  }

 private:
  WallMode mode_ = WallMode::none;
  PiecewiseFn f_;
  double offset_ = 0.0;
  double reverse_time_ = 0.0;
};

// Càdlàg evaluation of a wall; +inf for mode none. Throws DomainError for t < 0.
double eval_wall(const WallSpec& wall, double t);

// ---------------------------------------------------------------------------
// Trajectories

/// Full jump history of particles 1..N over [0, horizon]. Labels are 1-based;
/// positions strictly decrease in label at all times.
class Trajectory {
 public:
  Trajectory() = default;

  std::size_t size() const noexcept { return initial_.size(); }
  double horizon() const noexcept { return horizon_; }
  std::span<const Site> initial_positions() const noexcept { return initial_; }
  std::span<const double> jump_times(std::size_t label) const;

  // x_n(t), right-continuous (counts a jump at exactly t).
  Site position_at(std::size_t label, double t) const;
  Site final_position(std::size_t label) const;
  std::vector<Site> final_positions() const;

  // CSV: label,jump_index,time,new_position
  void write_csv(std::ostream& os) const;

 private:
  friend void simulate_into(Trajectory&, std::span<const Site>, const WallSpec&, double,
                            ClockField&);
  std::vector<Site> initial_;
  std::vector<std::vector<double>> jumps_;
  double horizon_ = 0.0;
};

// Exact event-driven realization of TASEP driven by `clocks`. Only sites that
// carry a particle are scheduled; a particle is never influenced by the
// particles behind it, so simulating labels 1..N is exact for those labels.
Trajectory simulate(std::span<const Site> positions, const WallSpec& wall, double horizon,
                    ClockField& clocks);

// Same as simulate, reusing the storage of `out`.
void simulate_into(Trajectory& out, std::span<const Site> positions, const WallSpec& wall,
                   double horizon, ClockField& clocks);

// Throws PreconditionError unless strictly decreasing and nonempty.
void check_positions(std::span<const Site> positions);

}  // namespace excluwall
