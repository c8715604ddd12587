#include "excluwall/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <random>

namespace excluwall {

namespace {

std::vector<Site> geometric_gap_positions(Site first, double rho, std::size_t n,
                                          std::mt19937_64& rng) {
  // Gaps x_k - x_{k+1} - 1 are Geometric(rho) on {0,1,...}.
  std::geometric_distribution<Site> gap(rho);
  std::vector<Site> out;
  out.reserve(n);
  Site x = first;
  out.push_back(x);
  while (out.size() < n) {
    x -= 1 + gap(rng);
    out.push_back(x);
  }
  return out;
}

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
}

}  // namespace

std::vector<Site> materialize_ic(const InitialConditionSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.n_max;
  if (n < 1) throw PreconditionError("n_max must be at least 1");
  struct Visitor {
    std::size_t n;
    std::uint64_t seed;
    std::vector<Site> operator()(const StepIC& s) const {
      std::vector<Site> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = s.offset - static_cast<Site>(i);
      return out;
    }
    std::vector<Site> operator()(const ExplicitIC& s) const {
      if (s.sites.size() < n) {
        throw PreconditionError("explicit initial condition has " + std::to_string(s.sites.size()) +
                                " sites, need " + std::to_string(n));
      }
      std::vector<Site> out(s.sites.begin(), s.sites.begin() + static_cast<std::ptrdiff_t>(n));
      check_positions(out);
      return out;
    }
    std::vector<Site> operator()(const HalfPeriodicIC& s) const {
      if (!(s.d >= 1.0) || !std::isfinite(s.d)) throw DomainError("half-periodic IC requires d >= 1");
      std::vector<Site> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = -static_cast<Site>(std::floor(s.d * static_cast<double>(i)));
      }
      return out;
    }
    std::vector<Site> operator()(const HalfBernoulliIC& s) const {
      check_rho(s.rho);
      std::mt19937_64 rng(seed);
      return geometric_gap_positions(0, s.rho, n, rng);
    }
    std::vector<Site> operator()(const StationaryIC& s) const {
      check_rho(s.rho);
      if (s.window < 0) throw DomainError("stationary IC window must be nonnegative");
      std::mt19937_64 rng(seed);
      std::geometric_distribution<Site> first(s.rho);
      const Site x1 = -first(rng);
      return geometric_gap_positions(x1, s.rho, n, rng);
    }
  };
  return std::visit(Visitor{n, seed}, spec.kind);
}

void check_positions(std::span<const Site> positions) {
  if (positions.empty()) throw PreconditionError("at least one particle required");
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] < positions[i - 1])) {
      throw PreconditionError("positions must be strictly decreasing in label (label " +
                              std::to_string(i + 1) + ")");
    }
  }
}

// ---------------------------------------------------------------------------

WallSpec WallSpec::right_wall(PiecewiseFn f) {
  if (f(0.0) != 0.0) throw PreconditionError("right wall requires f(0) = 0");
  WallSpec w;
  w.mode_ = WallMode::right_wall;
  w.f_ = std::move(f);
  return w;
}

WallSpec WallSpec::min_site(PiecewiseFn f, double offset, double reverse_time) {
  if (!std::isfinite(offset) || !(reverse_time >= 0.0)) {
    throw PreconditionError("min-site wall: bad offset or reverse time");
  }
  WallSpec w;
  w.mode_ = WallMode::min_site;
  w.f_ = std::move(f);
  w.offset_ = offset;
  w.reverse_time_ = reverse_time;
  return w;
}

double WallSpec::value(double t) const {
  if (!(t >= 0.0)) throw DomainError("wall evaluated at negative time");
  switch (mode_) {
    case WallMode::none:
      return std::numeric_limits<double>::infinity();
    case WallMode::right_wall:
      return f_(t);
    case WallMode::min_site:
      return offset_ - f_(reverse_time_ - t);
  }
  return std::numeric_limits<double>::infinity();
}

double eval_wall(const WallSpec& wall, double t) { return wall.value(t); }

// ---------------------------------------------------------------------------

std::span<const double> Trajectory::jump_times(std::size_t label) const {
  if (label < 1 || label > size()) throw RangeError("label out of range");
  return jumps_[label - 1];
}

Site Trajectory::position_at(std::size_t label, double t) const {
  if (label < 1 || label > size()) throw RangeError("label out of range");
  if (!(t >= 0.0) || t > horizon_) throw RangeError("time outside [0, horizon]");
  const auto& j = jumps_[label - 1];
  const auto count = std::upper_bound(j.begin(), j.end(), t) - j.begin();
  return initial_[label - 1] + static_cast<Site>(count);
}

Site Trajectory::final_position(std::size_t label) const {
  if (label < 1 || label > size()) throw RangeError("label out of range");
  return initial_[label - 1] + static_cast<Site>(jumps_[label - 1].size());
}

std::vector<Site> Trajectory::final_positions() const {
  std::vector<Site> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = initial_[i] + static_cast<Site>(jumps_[i].size());
  return out;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "label,jump_index,time,new_position\n";
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < jumps_[i].size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", jumps_[i][k]);
      os << (i + 1) << ',' << (k + 1) << ',' << buf << ','
         << initial_[i] + static_cast<Site>(k + 1) << '\n';
    }
  }
}

namespace {

struct Pending {
  double time;
  Site site;
  std::size_t index;  // 0-based label
};

// Min-heap on time; simultaneous events (floating collisions across sites)
// resolve lower site first.
struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.site > b.site;
  }
};

}  // namespace

void simulate_into(Trajectory& out, std::span<const Site> positions, const WallSpec& wall,
                   double horizon, ClockField& clocks) {
  check_positions(positions);
  if (!(horizon >= 0.0) || horizon > clocks.horizon()) {
    throw PreconditionError("simulation horizon must lie in [0, clock horizon]");
  }
  const std::size_t n = positions.size();
  out.initial_.assign(positions.begin(), positions.end());
  out.horizon_ = horizon;
  if (out.jumps_.size() > n) out.jumps_.resize(n);
  for (auto& j : out.jumps_) j.clear();
  out.jumps_.resize(n);

  std::vector<Pending> storage;
  storage.reserve(n);
  std::priority_queue<Pending, std::vector<Pending>, Later> queue(Later{}, std::move(storage));

  std::vector<Site> current(positions.begin(), positions.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto t = clocks.next_event(current[i], 0.0); t && *t <= horizon) {
      queue.push({*t, current[i], i});
    }
  }
  while (!queue.empty()) {
    const Pending ev = queue.top();
    queue.pop();
    const Site z = current[ev.index];
    const bool free = ev.index == 0 || current[ev.index - 1] != z + 1;
    Site at = z;
    if (free && wall.admits(ev.index + 1, z, ev.time)) {
      at = z + 1;
      current[ev.index] = at;
      out.jumps_[ev.index].push_back(ev.time);
    }
    if (auto t = clocks.next_event(at, ev.time); t && *t <= horizon) {
      queue.push({*t, at, ev.index});
    }
  }
}

Trajectory simulate(std::span<const Site> positions, const WallSpec& wall, double horizon,
                    ClockField& clocks) {
  Trajectory t;
  simulate_into(t, positions, wall, horizon, clocks);
  return t;
}

}  // namespace excluwall
