#pragma once

#include <limits>
#include <span>
#include <vector>

#include "excluwall/error.hpp"

namespace excluwall {

// One knot of a piecewise-linear function. `value` is the right value f(t);
// `jump` >= 0 is the size of an upward jump at t, so f(t-) = value - jump.
struct Breakpoint {
  double t = 0.0;
  double value = 0.0;
  double jump = 0.0;
};

/// Nondecreasing càdlàg function on [0, inf) that is linear between knots and
/// may jump upward at a knot. After the last knot it continues with
/// `tail_slope` (default flat).
class PiecewiseFn {
 public:
  PiecewiseFn();  // f == 0

  // Validates: first knot at t = 0 with no jump, strictly increasing knot
  // times, finite values, nondecreasing between knots, jumps >= 0,
  // tail_slope >= 0. Throws PreconditionError otherwise.
  static PiecewiseFn from_breakpoints(std::vector<Breakpoint> knots, double tail_slope = 0.0);
  static PiecewiseFn constant(double c);
  static PiecewiseFn linear(double slope);

  // The demo moving wall: slope 2/3 on [0, 0.35T), then
  // T/15 + t/2, with an upward jump at 0.35T.
  static PiecewiseFn demo_wall(double T);

  double operator()(double t) const;  // right-continuous value; throws DomainError for t < 0
  double left_limit(double t) const;  // f(t-), with f(0-) := f(0)

  // Knot times (including 0), in increasing order.
  std::vector<double> knot_times() const;
  std::span<const Breakpoint> knots() const noexcept { return knots_; }
  double tail_slope() const noexcept { return tail_slope_; }

  // Times in (t0, t1] at which floor(f) changes value, ascending. Used to split
  // time into intervals where the integer wall position is constant.
  std::vector<double> floor_change_times(double t0, double t1) const;

  PiecewiseFn shifted(double delta) const;  // f + delta

 private:
  std::vector<Breakpoint> knots_;
  double tail_slope_ = 0.0;
};

}  // namespace excluwall
