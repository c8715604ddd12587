#include "master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace oracle {

namespace {

// Poisson(lambda) weights until the remaining mass is below 1e-15.
std::vector<double> poisson_weights(double lambda) {
  std::vector<double> w;
  double term = std::exp(-lambda);
  double mass = 0.0;
  for (int k = 0; k < 100000; ++k) {
    if (k > 0) term *= lambda / k;
    w.push_back(term);
    mass += term;
    if (k > lambda && 1.0 - mass < 1e-15) break;
  }
  return w;
}

}  // namespace

MasterEquation::MasterEquation(std::vector<Site> initial, std::optional<PiecewiseFn> wall, double T) {
  const std::size_t n = initial.size();
  if (n == 0) throw std::invalid_argument("no particles");
  // Particle 1 moves at most Poisson(T) steps; the tail beyond 24 + 4T is far below 1e-15.
  const Site cap = wall ? static_cast<Site>(std::floor((*wall)(T))) : initial[0] + 24 + static_cast<Site>(4 * std::ceil(T));

  std::map<std::vector<Site>, std::size_t> index;
  std::vector<std::vector<Site>> states;
  std::deque<std::vector<Site>> todo{initial};
  index[initial] = 0;
  states.push_back(initial);
  while (!todo.empty()) {
    const auto x = todo.front();
    todo.pop_front();
    for (std::size_t i = 0; i < n; ++i) {
      const Site target = x[i] + 1;
      if (i == 0 ? target > cap : target >= x[i - 1]) continue;
      auto y = x;
      y[i] = target;
      if (index.emplace(y, states.size()).second) {
        states.push_back(y);
        todo.push_back(y);
      }
    }
  }

  // moves[s * n + i]: state reached when particle i jumps, -1 if blocked by exclusion or the cap.
  std::vector<long> moves(states.size() * n, -1);
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      auto y = states[s];
      y[i] += 1;
      if (const auto it = index.find(y); it != index.end() && (i == 0 || y[i] < y[i - 1])) {
        moves[s * n + i] = static_cast<long>(it->second);
      }
    }
  }

  // Interval end points: where floor(f) changes.
  std::vector<double> cuts{0.0};
  if (wall) {
    for (double t : wall->floor_change_times(0.0, T)) {
      if (t < T) cuts.push_back(t);
    }
  }
  cuts.push_back(T);

  std::vector<double> p(states.size(), 0.0);
  p[0] = 1.0;
  const double rate = static_cast<double>(n);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double dt = cuts[k + 1] - cuts[k];
    if (dt <= 0.0) continue;
    const Site bound = wall ? static_cast<Site>(std::floor((*wall)(0.5 * (cuts[k] + cuts[k + 1])))) : cap;
    // One step of the uniformized chain: each particle rings with probability 1/n.
    auto step = [&](const std::vector<double>& v) {
      std::vector<double> out(v.size(), 0.0);
      for (std::size_t s = 0; s < states.size(); ++s) {
        if (v[s] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
          const long to = moves[s * n + i];
          const bool ok = to >= 0 && (i > 0 || states[s][0] + 1 <= bound);
          out[ok ? static_cast<std::size_t>(to) : s] += v[s] / rate;
        }
      }
      return out;
    };
    const auto w = poisson_weights(rate * dt);
    std::vector<double> acc(p.size(), 0.0);
    std::vector<double> v = p;
    for (std::size_t j = 0; j < w.size(); ++j) {
      for (std::size_t s = 0; s < v.size(); ++s) acc[s] += w[j] * v[s];
      if (j + 1 < w.size()) v = step(v);
    }
    p = std::move(acc);
  }
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (p[s] > 0.0) law_[states[s]] = p[s];
  }
}

double MasterEquation::survival(std::size_t label, Site s) const {
  double sum = 0.0;
  for (const auto& [x, q] : law_) {
    if (x.at(label - 1) > s) sum += q;
  }
  return sum;
}

double MasterEquation::min_cdf(const std::vector<std::size_t>& labels, const std::vector<Site>& shifts,
                               Site s) const {
  double sum = 0.0;
  for (const auto& [x, q] : law_) {
    Site m = x.at(labels[0] - 1) + shifts[0];
    for (std::size_t j = 1; j < labels.size(); ++j) m = std::min(m, x.at(labels[j] - 1) + shifts[j]);
    if (m <= s) sum += q;
  }
  return sum;
}

double MasterEquation::total_mass() const {
  double sum = 0.0;
  for (const auto& [x, q] : law_) sum += q;
  return sum;
}

}  // namespace oracle
