#pragma once

#include <functional>
#include <span>
#include <vector>

#include "excluwall/clockfield.hpp"
#include "excluwall/error.hpp"

namespace excluwall {

/// A bijection of Z that is the identity outside the window [lo, hi].
/// forward: site -> colour, inverse: colour -> site.
class PermutationConfig {
 public:
  PermutationConfig() = default;  // identity, empty window

  static PermutationConfig identity(Site lo, Site hi);
  // colours[k] is the colour at site lo + k; must be a permutation of [lo, lo + size).
  static PermutationConfig from_colours(Site lo, std::vector<Colour> colours);

  bool empty_window() const noexcept { return forward_.empty(); }
  Site lo() const noexcept { return lo_; }
  Site hi() const noexcept { return lo_ + static_cast<Site>(forward_.size()) - 1; }

  Colour colour_at(Site z) const noexcept;
  Site site_of(Colour c) const noexcept;

  // Grow the window (identity fill) so that it contains [a, b].
  void ensure(Site a, Site b);

  // W_{(z,z+1)}: exchange iff colour_at(z) < colour_at(z+1). Returns whether
  // an exchange happened.
  bool swap(Site z);

  PermutationConfig inverted() const;

  // forward and inverse are mutually inverse on the window.
  bool consistent() const;

  // Equality as bijections of Z; window extents are irrelevant.
  friend bool operator==(const PermutationConfig& a, const PermutationConfig& b);

 private:
  Site lo_ = 0;
  std::vector<Colour> forward_;
  std::vector<Site> inverse_;  // inverse_[c - lo_]
};

PermutationConfig apply_swap(PermutationConfig cfg, Site z);
PermutationConfig invert(const PermutationConfig& cfg);

// Applies `seq` left to right to the identity.
PermutationConfig apply_sequence(std::span<const Site> seq,
                                 const PermutationConfig& start = PermutationConfig{});

/// Occupancy obtained by viewing colours <= cutoff as particles.
struct Occupancy {
  Site lo = 0;
  Site hi = -1;
  Colour cutoff = 0;
  std::vector<bool> occupied;  // sites lo..hi

  bool contains(Site z) const noexcept {
    if (z < lo || z > hi) return z <= cutoff;
    return occupied[static_cast<std::size_t>(z - lo)];
  }
};

Occupancy marginal(const PermutationConfig& cfg, Colour cutoff);

using SwapAdmissible = std::function<bool(Site z, double t)>;
// Called after every admissible clock event; `swapped` tells whether W changed cfg.
using SwapObserver = std::function<void(double t, Site z, bool swapped, const PermutationConfig& cfg)>;

/// Multi-species TASEP from cfg0 driven by `clocks` up to `horizon`. The
/// dynamics run on the pairs (z, z+1) inside cfg0's window; sites outside it
/// are frozen, so the caller picks a window that covers every site the
/// colours of interest can reach.
PermutationConfig simulate_multi(const PermutationConfig& cfg0, const SwapAdmissible& admissible,
                                 double horizon, ClockField& clocks,
                                 const SwapObserver& observer = {});

/// The permutation pi that maps the packed configuration onto the initial
/// condition u on sites >= u_n, expanded into adjacent transpositions.
struct PiConstruction {
  std::vector<std::pair<Site, Site>> exchanges;  // (a, b) in application order
  std::vector<Site> swaps;                       // adjacent swap sites, application order
  PermutationConfig pi_id;                       // pi applied to id
  std::size_t k = 0;
};

// u: first n positions, strictly decreasing, u_1 <= 0. Throws
// PreconditionError for n < 2 (no permutation is needed for one particle).
PiConstruction build_pi(std::span<const Site> u);

// Swap sites of the exchange of a < b: b-1 down to a, then a+1 up to b-1.
std::vector<Site> exchange_swaps(Site a, Site b);

// Applying seq in order to id equals the inverse of applying the reversed seq.
bool colour_position_check(std::span<const Site> seq);

enum class ExchangeOutcome { holds, fails, hypothesis_not_met };

/// occupied[k] describes site a + k for k = 0..b-a. Applies the exchange of a
/// and b to the configuration (particles colour 0, holes colour 1) and checks
/// the three conclusions.
ExchangeOutcome exchange_check(std::span<const bool> occupied, Site a, Site b, Site x);

}  // namespace excluwall
