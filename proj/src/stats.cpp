#include "excluwall/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace excluwall {

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw PreconditionError("ecdf of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(const Ecdf& f, const Ecdf& g) {
  // Both functions are constant between consecutive points of the merged
  // jump set, so the supremum is attained at one of them.
  double d = 0.0;
  for (double x : f.sorted()) d = std::max(d, std::abs(f(x) - g(x)));
  for (double x : g.sorted()) d = std::max(d, std::abs(f(x) - g(x)));
  return d;
}

double kolmogorov_survival(double lambda) {
  // P(K > 0.2) differs from 1 by less than 1e-20.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(const Ecdf& sample, const std::function<double(double)>& cdf) {
  const auto xs = sample.sorted();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - c, c - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

Interval wilson_ci(std::uint64_t k, std::uint64_t n, double level) {
  if (n == 0 || k > n) throw PreconditionError("wilson_ci: need 0 <= k <= n and n >= 1");
  if (!(level > 0.0 && level < 1.0)) throw PreconditionError("wilson_ci: level must lie in (0,1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (k == 0) ci.lo = 0.0;
  if (k == n) ci.hi = 1.0;
  return ci;
}

double dkw_band(std::size_t n, double level) {
  if (n == 0) throw PreconditionError("dkw_band: n must be positive");
  if (!(level > 0.0 && level < 1.0)) throw PreconditionError("dkw_band: level must lie in (0,1)");
  return std::sqrt(std::log(2.0 / (1.0 - level)) / (2.0 * static_cast<double>(n)));
}

DensityProfile empirical_density(const std::vector<std::vector<Site>>& ensemble, Site bin_width,
                                 Site lo, Site hi) {
  if (ensemble.empty()) throw PreconditionError("empirical_density: empty ensemble");
  if (bin_width < 1) throw PreconditionError("empirical_density: bin width must be >= 1");
  DensityProfile out;
  out.lo = lo;
  out.bin_width = bin_width;
  const Site bins = hi >= lo ? (hi - lo + 1) / bin_width : 0;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (const auto& cfg : ensemble) {
    for (Site z : cfg) {
      if (z < lo) continue;
      const Site k = (z - lo) / bin_width;
      if (k < bins) counts[static_cast<std::size_t>(k)] += 1.0;
    }
  }
  const double norm = static_cast<double>(ensemble.size()) * static_cast<double>(bin_width);
  out.density.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) out.density[k] = counts[k] / norm;
  return out;
}

double decoupling_check(const Ecdf& lhs, const Ecdf& comp1, const Ecdf& comp2,
                        std::span<const double> grid) {
  double d = 0.0;
  for (double s : grid) {
    d = std::max(d, std::abs(lhs.survival(s) - comp1.survival(s) * comp2.survival(s)));
  }
  return d;
}

}  // namespace excluwall
