#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "excluwall/error.hpp"

namespace excluwall {

/// Right-continuous empirical CDF: F(x) = #{samples <= x} / N.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);  // throws PreconditionError if empty

  double operator()(double x) const noexcept;
  double survival(double x) const noexcept { return 1.0 - (*this)(x); }
  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// sup |F - G| over the union of jump points.
double ks_distance(const Ecdf& f, const Ecdf& g);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample test against a continuous CDF (asymptotic p-value with the
// Stephens small-sample correction).
KsResult ks_one_sample(const Ecdf& sample, const std::function<double(double)>& cdf);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double half_width() const noexcept { return 0.5 * (hi - lo); }
};

// Wilson score interval for k successes in n trials. Throws PreconditionError
// unless 0 <= k <= n, n >= 1 and level in (0,1).
Interval wilson_ci(std::uint64_t k, std::uint64_t n, double level = 0.99);

// DKW half-width sqrt(ln(2/delta) / (2n)) with delta = 1 - level.
double dkw_band(std::size_t n, double level = 0.99);

struct DensityProfile {
  Site lo = 0;
  Site bin_width = 1;
  std::vector<double> density;  // bin k covers [lo + k w, lo + (k+1) w)

  double bin_centre(std::size_t k) const noexcept {
    return static_cast<double>(lo) + (static_cast<double>(k) + 0.5) * static_cast<double>(bin_width) - 0.5;
  }
};

// Per-bin occupied fraction over [lo, hi], averaged over the ensemble. A
// trailing partial bin is dropped.
DensityProfile empirical_density(const std::vector<std::vector<Site>>& ensemble, Site bin_width,
                                 Site lo, Site hi);

// sup over grid of |S_lhs(s) - S_1(s) S_2(s)| with survival S = 1 - F.
double decoupling_check(const Ecdf& lhs, const Ecdf& comp1, const Ecdf& comp2,
                        std::span<const double> grid);

}  // namespace excluwall
