#include "excluwall/multispecies.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace excluwall {

PermutationConfig PermutationConfig::identity(Site lo, Site hi) {
  PermutationConfig p;
  if (hi >= lo) p.ensure(lo, hi);
  return p;
}

PermutationConfig PermutationConfig::from_colours(Site lo, std::vector<Colour> colours) {
  PermutationConfig p;
  p.lo_ = lo;
  const auto n = colours.size();
  p.inverse_.assign(n, 0);
  std::vector<bool> seen(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const Colour c = colours[k];
    if (c < lo || c >= lo + static_cast<Site>(n) || seen[static_cast<std::size_t>(c - lo)]) {
      throw PreconditionError("colours must be a permutation of the window");
    }
    seen[static_cast<std::size_t>(c - lo)] = true;
    p.inverse_[static_cast<std::size_t>(c - lo)] = lo + static_cast<Site>(k);
  }
  p.forward_ = std::move(colours);
  return p;
}

Colour PermutationConfig::colour_at(Site z) const noexcept {
  if (forward_.empty() || z < lo_ || z > hi()) return z;
  return forward_[static_cast<std::size_t>(z - lo_)];
}

Site PermutationConfig::site_of(Colour c) const noexcept {
  if (inverse_.empty() || c < lo_ || c > hi()) return c;
  return inverse_[static_cast<std::size_t>(c - lo_)];
}

void PermutationConfig::ensure(Site a, Site b) {
  if (b < a) return;
  if (forward_.empty()) {
    lo_ = a;
    const auto n = static_cast<std::size_t>(b - a + 1);
    forward_.resize(n);
    inverse_.resize(n);
    for (std::size_t k = 0; k < n; ++k) forward_[k] = inverse_[k] = a + static_cast<Site>(k);
    return;
  }
  if (a < lo_) {
    const auto grow = static_cast<std::size_t>(lo_ - a);
    std::vector<Colour> f(grow);
    for (std::size_t k = 0; k < grow; ++k) f[k] = a + static_cast<Site>(k);
    forward_.insert(forward_.begin(), f.begin(), f.end());
    inverse_.insert(inverse_.begin(), f.begin(), f.end());
    lo_ = a;
  }
  if (b > hi()) {
    const Site old_hi = hi();
    for (Site z = old_hi + 1; z <= b; ++z) {
      forward_.push_back(z);
      inverse_.push_back(z);
    }
  }
}

bool PermutationConfig::swap(Site z) {
  if (forward_.empty() || z < lo_ || z + 1 > hi()) ensure(z, z + 1);
  const auto i = static_cast<std::size_t>(z - lo_);
  const Colour c0 = forward_[i];
  const Colour c1 = forward_[i + 1];
  if (!(c0 < c1)) return false;
  forward_[i] = c1;
  forward_[i + 1] = c0;
  inverse_[static_cast<std::size_t>(c1 - lo_)] = z;
  inverse_[static_cast<std::size_t>(c0 - lo_)] = z + 1;
  return true;
}

PermutationConfig PermutationConfig::inverted() const {
  PermutationConfig p;
  p.lo_ = lo_;
  p.forward_ = inverse_;
  p.inverse_ = forward_;
  return p;
}

bool PermutationConfig::consistent() const {
  if (forward_.size() != inverse_.size()) return false;
  for (std::size_t k = 0; k < forward_.size(); ++k) {
    const Colour c = forward_[k];
    if (c < lo_ || c > hi()) return false;
    if (inverse_[static_cast<std::size_t>(c - lo_)] != lo_ + static_cast<Site>(k)) return false;
  }
  return true;
}

bool operator==(const PermutationConfig& a, const PermutationConfig& b) {
  if (a.empty_window() && b.empty_window()) return true;
  Site lo, hi;
  if (a.empty_window()) {
    lo = b.lo();
    hi = b.hi();
  } else if (b.empty_window()) {
    lo = a.lo();
    hi = a.hi();
  } else {
    lo = std::min(a.lo(), b.lo());
    hi = std::max(a.hi(), b.hi());
  }
  for (Site z = lo; z <= hi; ++z) {
    if (a.colour_at(z) != b.colour_at(z)) return false;
  }
  return true;
}

PermutationConfig apply_swap(PermutationConfig cfg, Site z) {
  cfg.swap(z);
  return cfg;
}

PermutationConfig invert(const PermutationConfig& cfg) { return cfg.inverted(); }

PermutationConfig apply_sequence(std::span<const Site> seq, const PermutationConfig& start) {
  PermutationConfig p = start;
  if (!seq.empty()) {
    const auto [mn, mx] = std::minmax_element(seq.begin(), seq.end());
    p.ensure(*mn, *mx + 1);
  }
  for (Site z : seq) p.swap(z);
  return p;
}

Occupancy marginal(const PermutationConfig& cfg, Colour cutoff) {
  Occupancy o;
  o.cutoff = cutoff;
  if (cfg.empty_window()) return o;
  o.lo = cfg.lo();
  o.hi = cfg.hi();
  o.occupied.resize(static_cast<std::size_t>(o.hi - o.lo + 1));
  for (Site z = o.lo; z <= o.hi; ++z) {
    o.occupied[static_cast<std::size_t>(z - o.lo)] = cfg.colour_at(z) <= cutoff;
  }
  return o;
}

PermutationConfig simulate_multi(const PermutationConfig& cfg0, const SwapAdmissible& admissible,
                                 double horizon, ClockField& clocks, const SwapObserver& observer) {
  if (!(horizon >= 0.0) || horizon > clocks.horizon()) {
    throw PreconditionError("simulation horizon must lie in [0, clock horizon]");
  }
  PermutationConfig cfg = cfg0;
  if (cfg.empty_window() || cfg.hi() == cfg.lo()) return cfg;

  using Entry = std::pair<double, Site>;
  // Earliest first; equal times resolve to the lower site.
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (Site z = cfg.lo(); z < cfg.hi(); ++z) {
    if (auto t = clocks.next_event(z, 0.0); t && *t <= horizon) queue.emplace(*t, z);
  }
  while (!queue.empty()) {
    const auto [t, z] = queue.top();
    queue.pop();
    if (!admissible || admissible(z, t)) {
      const bool swapped = cfg.swap(z);
      if (observer) observer(t, z, swapped, cfg);
    }
    if (auto next = clocks.next_event(z, t); next && *next <= horizon) queue.emplace(*next, z);
  }
  return cfg;
}

std::vector<Site> exchange_swaps(Site a, Site b) {
  std::vector<Site> out;
  if (b <= a) return out;
  out.reserve(static_cast<std::size_t>(2 * (b - a) - 1));
  for (Site z = b - 1; z >= a; --z) out.push_back(z);
  for (Site z = a + 1; z <= b - 1; ++z) out.push_back(z);
  return out;
}

PiConstruction build_pi(std::span<const Site> u) {
  const std::size_t n = u.size();
  if (n < 2) throw PreconditionError("build_pi needs at least two particles");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(u[i] < u[i - 1])) throw PreconditionError("initial positions must strictly decrease");
  }
  if (u[0] > 0) throw PreconditionError("initial positions must satisfy u_1 <= 0");

  // 1-based access u_m.
  auto U = [&](std::size_t m) { return u[m - 1]; };
  const Site top = U(n) + static_cast<Site>(n) - 1;

  PiConstruction out;
  std::size_t k = 0;
  while (k + 1 < n - 1 && !(U(n - k - 1) >= top)) ++k;
  out.k = k;

  for (std::size_t j = 0; j <= k; ++j) {
    const Site base = U(n - j);
    const Site last_i = j < k ? U(n - j - 1) - base - 2 : top - 1 - base;
    const Site gaps = base - U(n) - static_cast<Site>(j);
    for (Site i = 0; i <= last_i; ++i) {
      const Site a = base + 1 + i;
      const auto m = static_cast<std::size_t>(1 + gaps + i);
      const Site b = U(m);
      if (a == b) continue;
      out.exchanges.emplace_back(a, b);
      const auto s = exchange_swaps(std::min(a, b), std::max(a, b));
      out.swaps.insert(out.swaps.end(), s.begin(), s.end());
    }
  }
  out.pi_id = apply_sequence(out.swaps);
  return out;
}

bool colour_position_check(std::span<const Site> seq) {
  const PermutationConfig forward = apply_sequence(seq);
  std::vector<Site> reversed(seq.rbegin(), seq.rend());
  const PermutationConfig backward = apply_sequence(reversed);
  return forward == backward.inverted();
}

ExchangeOutcome exchange_check(std::span<const bool> occupied, Site a, Site b, Site x) {
  if (!(a <= x && x < b) || occupied.size() != static_cast<std::size_t>(b - a + 1)) {
    return ExchangeOutcome::hypothesis_not_met;
  }
  auto at = [&](std::span<const bool> occ, Site z) { return occ[static_cast<std::size_t>(z - a)]; };
  bool hole_right = false;
  bool particle_left = false;
  for (Site z = x + 1; z <= b; ++z) hole_right = hole_right || !at(occupied, z);
  for (Site z = a; z <= x; ++z) particle_left = particle_left || at(occupied, z);
  if (!hole_right || !particle_left) return ExchangeOutcome::hypothesis_not_met;

  // Particles carry colour 0, holes colour 1; W exchanges a particle at z with
  // a hole at z + 1.
  std::vector<Colour> colour(occupied.size());
  for (std::size_t k = 0; k < occupied.size(); ++k) colour[k] = occupied[k] ? 0 : 1;
  for (Site z : exchange_swaps(a, b)) {
    auto& c0 = colour[static_cast<std::size_t>(z - a)];
    auto& c1 = colour[static_cast<std::size_t>(z + 1 - a)];
    if (c0 < c1) std::swap(c0, c1);
  }
  auto holes_in = [&](auto&& is_hole) {
    int count = 0;
    for (Site z = a; z <= x; ++z) count += is_hole(z) ? 1 : 0;
    return count;
  };
  const int before = holes_in([&](Site z) { return !at(occupied, z); });
  const int after = holes_in([&](Site z) { return colour[static_cast<std::size_t>(z - a)] == 1; });
  const bool ok = after == before + 1 && colour.front() == 1 && colour.back() == 0;
  return ok ? ExchangeOutcome::holds : ExchangeOutcome::fails;
}

}  // namespace excluwall
