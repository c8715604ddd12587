#include "excluwall/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace excluwall {

PiecewiseFn::PiecewiseFn() : knots_{Breakpoint{0.0, 0.0, 0.0}} {}

PiecewiseFn PiecewiseFn::from_breakpoints(std::vector<Breakpoint> knots, double tail_slope) {
  if (knots.empty()) throw PreconditionError("wall: at least one breakpoint required");
  if (knots.front().t != 0.0) throw PreconditionError("wall: first breakpoint must be at t = 0");
  if (knots.front().jump != 0.0) throw PreconditionError("wall: no jump allowed at t = 0");
  if (!(tail_slope >= 0.0) || !std::isfinite(tail_slope)) {
    throw PreconditionError("wall: tail slope must be finite and nonnegative");
  }
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const Breakpoint& b = knots[k];
    if (!std::isfinite(b.t) || !std::isfinite(b.value) || !std::isfinite(b.jump)) {
      throw PreconditionError("wall: non-finite breakpoint");
    }
    if (b.jump < 0.0) {
      throw PreconditionError("wall: downward jump at t = " + std::to_string(b.t) +
                              " (function must be nondecreasing)");
    }
    if (k > 0) {
      const Breakpoint& a = knots[k - 1];
      if (!(b.t > a.t)) throw PreconditionError("wall: breakpoint times must increase strictly");
      if (b.value - b.jump < a.value) {
        throw PreconditionError("wall: decreasing segment ending at t = " + std::to_string(b.t));
      }
    }
  }
  PiecewiseFn f;
  f.knots_ = std::move(knots);
  f.tail_slope_ = tail_slope;
  return f;
}

PiecewiseFn PiecewiseFn::constant(double c) { return from_breakpoints({{0.0, c, 0.0}}); }

PiecewiseFn PiecewiseFn::linear(double slope) { return from_breakpoints({{0.0, 0.0, 0.0}}, slope); }

PiecewiseFn PiecewiseFn::demo_wall(double T) {
  if (!(T > 0.0)) throw DomainError("demo_wall wall: T must be positive");
  const double kink = 0.35 * T;
  const double before = 2.0 / 3.0 * kink;
  const double after = T / 15.0 + 0.5 * kink;
  return from_breakpoints({{0.0, 0.0, 0.0}, {kink, after, after - before}}, 0.5);
}

double PiecewiseFn::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("wall evaluated at negative time");
  // Last knot with knot.t <= t.
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double x, const Breakpoint& b) { return x < b.t; });
  const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const Breakpoint& a = knots_[k];
  if (k + 1 == knots_.size()) return a.value + tail_slope_ * (t - a.t);
  const Breakpoint& b = knots_[k + 1];
  const double left = b.value - b.jump;
  return a.value + (left - a.value) * (t - a.t) / (b.t - a.t);
}

double PiecewiseFn::left_limit(double t) const {
  if (!(t >= 0.0)) throw DomainError("wall evaluated at negative time");
  const auto it = std::lower_bound(knots_.begin(), knots_.end(), t,
                                   [](const Breakpoint& b, double x) { return b.t < x; });
  if (it != knots_.end() && it->t == t) return it->value - it->jump;
  return (*this)(t);
}

std::vector<double> PiecewiseFn::knot_times() const {
  std::vector<double> out;
  out.reserve(knots_.size());
  for (const auto& b : knots_) out.push_back(b.t);
  return out;
}

std::vector<double> PiecewiseFn::floor_change_times(double t0, double t1) const {
  std::vector<double> out;
  auto add_linear = [&](double ta, double va, double tb, double vb) {
    // f linear from va at ta to vb as t -> tb; floor changes where f hits an integer.
    if (!(vb > va)) return;
    const double slope = (vb - va) / (tb - ta);
    for (double m = std::floor(va) + 1.0; m <= vb; m += 1.0) {
      const double t = ta + (m - va) / slope;
      if (t > t0 && t <= t1 && t < tb) out.push_back(t);
    }
  };
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    const Breakpoint& a = knots_[k];
    if (a.jump > 0.0 && std::floor(a.value) != std::floor(a.value - a.jump) && a.t > t0 &&
        a.t <= t1) {
      out.push_back(a.t);
    }
    if (a.t >= t1) break;
    if (k + 1 < knots_.size()) {
      const Breakpoint& b = knots_[k + 1];
      add_linear(a.t, a.value, b.t, b.value - b.jump);
    } else if (tail_slope_ > 0.0) {
      add_linear(a.t, a.value, t1 + 1.0, a.value + tail_slope_ * (t1 + 1.0 - a.t));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PiecewiseFn PiecewiseFn::shifted(double delta) const {
  PiecewiseFn f = *this;
  for (auto& b : f.knots_) b.value += delta;
  return f;
}

}  // namespace excluwall
