#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "excluwall/stats.hpp"

using namespace excluwall;
using doctest::Approx;

namespace {

double naive_cdf(const std::vector<double>& xs, double x) {
  std::size_t c = 0;
  for (double v : xs) c += v <= x ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(xs.size());
}

// P(K <= lambda) in the theta-function form.
double kolmogorov_cdf_theta(double lambda) {
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double j = 2.0 * k - 1.0;
    sum += std::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
  }
  return std::sqrt(2.0 * pi) / lambda * sum;
}

double bisect(double lo, double hi, const std::function<double(double)>& fn) {
  const bool rising = fn(hi) > 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((fn(mid) > 0.0) == rising ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> draw(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("ecdf against direct counting") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> die(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(1 + trial % 37);
    for (auto& x : xs) x = die(rng);
    const Ecdf f(xs);
    for (double x = -1.0; x <= 10.0; x += 0.5) {
      REQUIRE(f(x) == naive_cdf(xs, x));
      REQUIRE(f.survival(x) == 1.0 - naive_cdf(xs, x));
    }
  }
  CHECK_THROWS_AS(Ecdf(std::vector<double>{}), PreconditionError);
}

TEST_CASE("two-sample distance against a dense scan") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(5 + trial), b(3 + 2 * trial);
    for (auto& x : a) x = std::round(4 * z(rng)) / 4;
    for (auto& x : b) x = std::round(4 * z(rng)) / 4 + 0.25;
    double d = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.125) d = std::max(d, std::abs(naive_cdf(a, x) - naive_cdf(b, x)));
    REQUIRE(ks_distance(Ecdf(a), Ecdf(b)) == Approx(d));
  }
  const Ecdf same(std::vector<double>{1, 2, 3});
  CHECK(ks_distance(same, same) == 0.0);
  CHECK(ks_distance(same, Ecdf(std::vector<double>{10})) == 1.0);
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_survival(1.358) == Approx(0.05).epsilon(0.01));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(10.0) < 1e-80);
  for (double lambda = 0.3; lambda <= 3.0; lambda += 0.1) {
    CHECK(1.0 - kolmogorov_survival(lambda) == Approx(kolmogorov_cdf_theta(lambda)).epsilon(1e-9));
  }
}

TEST_CASE("one-sample test") {
  std::mt19937_64 rng(3);
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  int rejections = 0;
  for (int trial = 0; trial < 200; ++trial) rejections += ks_one_sample(Ecdf(draw(rng, 500)), uniform).p_value < 0.05;
  CHECK(rejections < 20);
  std::vector<double> skewed = draw(rng, 500);
  for (auto& x : skewed) x = x * x;
  CHECK(ks_one_sample(Ecdf(skewed), uniform).p_value < 1e-6);
  const auto r = ks_one_sample(Ecdf(std::vector<double>{0.5}), uniform);
  CHECK(r.statistic == Approx(0.5));
}

TEST_CASE("Wilson interval") {
  const auto ci = wilson_ci(50, 100, 0.95);
  CHECK(ci.lo > 0.39);
  CHECK(ci.hi < 0.61);
  CHECK(ci.contains(0.5));
  for (std::uint64_t n : {10u, 100u, 2500u}) {
    for (std::uint64_t k : {std::uint64_t{1}, n / 3, n - 1}) {
      for (double level : {0.9, 0.95, 0.99}) {
        const double z = bisect(0.0, 10.0, [&](double x) { return std::erfc(x / std::sqrt(2.0)) - (1.0 - level); });
        const double ph = static_cast<double>(k) / static_cast<double>(n);
        // Endpoints solve (ph - p)^2 = z^2 p (1 - p) / n.
        auto score = [&](double p) { return (ph - p) * (ph - p) - z * z * p * (1.0 - p) / static_cast<double>(n); };
        const auto w = wilson_ci(k, n, level);
        CHECK(w.lo == Approx(bisect(0.0, ph, score)).epsilon(1e-9));
        CHECK(w.hi == Approx(bisect(ph, 1.0, score)).epsilon(1e-9));
      }
    }
  }
  CHECK(wilson_ci(0, 10).lo == 0.0);
  CHECK(wilson_ci(10, 10).hi == 1.0);
  CHECK_THROWS_AS(wilson_ci(0, 0), PreconditionError);
  CHECK_THROWS_AS(wilson_ci(11, 10), PreconditionError);
  CHECK_THROWS_AS(wilson_ci(1, 10, 1.0), PreconditionError);
}

TEST_CASE("DKW band covers the true distribution") {
  CHECK(dkw_band(1000, 0.99) == Approx(std::sqrt(std::log(200.0) / 2000.0)));
  std::mt19937_64 rng(4);
  const double band = dkw_band(1000, 0.99);
  int covered = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Ecdf f(draw(rng, 1000));
    const auto xs = f.sorted();
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      d = std::max({d, static_cast<double>(i + 1) / 1000.0 - xs[i], xs[i] - static_cast<double>(i) / 1000.0});
    }
    covered += d <= band;
  }
  CHECK(covered >= 970);
  CHECK_THROWS_AS(dkw_band(0), PreconditionError);
}

TEST_CASE("decoupling discrepancy") {
  std::mt19937_64 rng(5);
  const std::size_t n = 20000;
  std::normal_distribution<double> z;
  std::vector<double> lhs(n), a(n), b(n), dep(n);
  for (std::size_t i = 0; i < n; ++i) {
    lhs[i] = std::min(z(rng), 0.5 * z(rng) + 0.3);
    a[i] = z(rng);
    b[i] = 0.5 * z(rng) + 0.3;
    dep[i] = a[i];
  }
  std::vector<double> grid;
  for (double s = -3.0; s <= 3.0; s += 0.1) grid.push_back(s);
  const double band = dkw_band(n, 0.99);
  CHECK(decoupling_check(Ecdf(lhs), Ecdf(a), Ecdf(b), grid) <= 3.0 * band);
  // The first component alone is not a product of the two.
  CHECK(decoupling_check(Ecdf(dep), Ecdf(a), Ecdf(b), grid) > 0.1);
  // A degenerate component with survival 1 reduces the check to a two-sample comparison.
  const std::vector<double> far(10, 1e9);
  CHECK(decoupling_check(Ecdf(a), Ecdf(a), Ecdf(far), grid) == 0.0);
}

TEST_CASE("empirical density against direct counting") {
  std::mt19937_64 rng(6);
  std::vector<std::vector<Site>> ens(50);
  for (auto& cfg : ens) {
    for (Site z = 20; z >= -40; --z) {
      if (rng() % 3 == 0) cfg.push_back(z);
    }
  }
  const auto prof = empirical_density(ens, 7, -30, 10);
  REQUIRE(prof.density.size() == 5);
  for (std::size_t k = 0; k < prof.density.size(); ++k) {
    const Site lo = -30 + 7 * static_cast<Site>(k);
    double c = 0;
    for (const auto& cfg : ens) {
      for (Site z : cfg) c += (z >= lo && z < lo + 7) ? 1 : 0;
    }
    CHECK(prof.density[k] == Approx(c / (50.0 * 7.0)));
    CHECK(prof.bin_centre(k) == Approx(lo + 3.0));
  }
  const std::vector<std::vector<Site>> full{{3, 2, 1, 0, -1, -2}};
  for (double v : empirical_density(full, 2, -2, 3).density) CHECK(v == 1.0);
  CHECK_THROWS_AS(empirical_density({}, 1, 0, 1), PreconditionError);
  CHECK_THROWS_AS(empirical_density(full, 0, 0, 1), PreconditionError);
}
