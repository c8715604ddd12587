#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "excluwall/experiments.hpp"
#include "excluwall/identities.hpp"
#include "oracle/master_equation.hpp"

using namespace excluwall;

namespace {

std::vector<Site> step(std::size_t n, Site offset = 0) { return materialize_ic({StepIC{offset}, n}, 0); }

// min over t of x_n(t) + floor(f(T - t)), probing just before every jump, at T and on a dense grid.
Site margin_by_scan(const Trajectory& tr, std::size_t n, const PiecewiseFn& f, double T) {
  auto value = [&](double t) { return tr.position_at(n, t) + static_cast<Site>(std::floor(f(T - t))); };
  Site m = value(T);
  for (int k = 0; k <= 20000; ++k) m = std::min(m, value(std::min(T, T * k / 20000.0)));
  for (double tau : tr.jump_times(n)) m = std::min(m, value(std::max(0.0, tau - 1e-12)));
  return m;
}

std::vector<Site> draw_ic(std::mt19937_64& rng, std::size_t n) {
  std::geometric_distribution<Site> gap(0.5);
  std::vector<Site> u{std::uniform_int_distribution<Site>(-3, 3)(rng)};
  while (u.size() < n) u.push_back(u.back() - 1 - gap(rng));
  return u;
}

void check_against_oracle(const TwoSidedReport& r, double exact) {
  CHECK(r.verdict);
  CHECK(std::abs(r.lhs.p - exact) <= 3.0 * std::max(r.lhs.ci.half_width(), 1e-9));
  CHECK(std::abs(r.rhs.p - exact) <= 3.0 * std::max(r.rhs.ci.half_width(), 1e-9));
}

}  // namespace

TEST_CASE("wall margin trivial cases are constant over seeds") {
  const PiecewiseFn zero;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ClockField c(seed, 1.0);
    const Trajectory tr = simulate(step(3), WallSpec::none(), 1.0, c);
    CHECK(wall_margin_infimum(tr, 1, zero, 1.0, 0) <= 0);
    CHECK(wall_margin_infimum(tr, 1, zero, 1.0, -1) >= 1);
    CHECK(wall_identity_rhs_indicator(tr, step(1), &zero, 1, -1, 1.0));
    CHECK_FALSE(wall_identity_rhs_indicator(tr, step(1), &zero, 1, 0, 1.0));
    // Without a wall the indicator is the envelope minimum alone.
    const auto ic = materialize_ic({HalfPeriodicIC{2.0}, 3}, 0);
    const Site env = envelope_minimum(tr, ic, 3);
    CHECK(wall_identity_rhs_indicator(tr, ic, nullptr, 3, env - 1, 1.0));
    CHECK_FALSE(wall_identity_rhs_indicator(tr, ic, nullptr, 3, env, 1.0));
  }
  ClockField c(3, 2.0);
  const Trajectory pinned = simulate(step(1), WallSpec::right_wall(zero), 2.0, c);
  CHECK(wall_margin_infimum(pinned, 1, PiecewiseFn::linear(1.5), 2.0, -3) == 3);
  CHECK(wall_margin(pinned, 1, nullptr, 2.0) == std::numeric_limits<Site>::max());
}

TEST_CASE("wall margin against a dense scan") {
  std::mt19937_64 rng(4);
  const std::vector<PiecewiseFn> walls = {
      PiecewiseFn{},
      PiecewiseFn::from_breakpoints({{0, 0, 0}, {1, 1.5, 0}}, 0.5),
      PiecewiseFn::from_breakpoints({{0, 0, 0}, {0.5, 1, 1}, {1.7, 2.5, 1}}, 0.9),
      PiecewiseFn::demo_wall(4.0),
  };
  for (int trial = 0; trial < 300; ++trial) {
    const double T = std::uniform_real_distribution<double>(0.1, 4.0)(rng);
    ClockField c(rng(), T);
    const Trajectory tr = simulate(step(3), WallSpec::none(), T, c);
    for (const auto& f : walls) {
      for (std::size_t n = 1; n <= 3; ++n) REQUIRE(wall_margin(tr, n, &f, T) == margin_by_scan(tr, n, f, T));
    }
  }
}

TEST_CASE("identity estimates: degenerate cases") {
  const PiecewiseFn zero;
  const std::vector<Site> s{-1, 0};
  const auto r = estimate_wall_identity({StepIC{0}, 1}, &zero, 1, 1.0, s, {1000, 1, 1, 0.99});
  CHECK(r[0].lhs.p == 1.0);
  CHECK(r[0].rhs.p == 1.0);
  CHECK(r[1].lhs.p == 0.0);
  CHECK(r[1].rhs.p == 0.0);
  CHECK(r[0].verdict);
  CHECK(r[1].verdict);
}

TEST_CASE("identity estimate on a staircase wall matches the master equation") {
  const PiecewiseFn stairs = PiecewiseFn::from_breakpoints({{0, 0, 0}, {0.5, 1, 1}, {1.5, 2, 1}});
  const InitialConditionSpec ic{HalfPeriodicIC{2.0}, 2};
  const std::vector<Site> s{-1, 0, 1};
  const auto reports = estimate_wall_identity(ic, &stairs, 2, 2.0, s, {100000, 11, 1, 0.99});
  const oracle::MasterEquation me(materialize_ic(ic, 0), stairs, 2.0);
  for (std::size_t k = 0; k < s.size(); ++k) check_against_oracle(reports[k], me.survival(2, s[k]));
}

TEST_CASE("identity estimate is monotone in s") {
  const PiecewiseFn kink = PiecewiseFn::from_breakpoints({{0, 0, 0}, {1, 1.5, 0}}, 0.5);
  const std::vector<Site> s{-5, -4, -3, -2, -1, 0, 1};
  const auto r = estimate_wall_identity({ExplicitIC{{0, -2, -5}}, 3}, &kink, 3, 2.0, s, {20000, 12, 1, 0.99});
  for (std::size_t k = 1; k < r.size(); ++k) {
    CHECK(r[k].lhs.p <= r[k - 1].lhs.p);
    CHECK(r[k].rhs.p <= r[k - 1].rhs.p);
  }
}

TEST_CASE("random initial conditions are resampled on the right side") {
  const PiecewiseFn kink = PiecewiseFn::from_breakpoints({{0, 0, 0}, {1, 1.5, 0}}, 0.5);
  const std::vector<Site> s{-4, -3, -2};
  for (const auto& r : estimate_wall_identity({HalfBernoulliIC{0.5}, 2}, &kink, 2, 1.5, s, {50000, 13, 1, 0.99})) {
    CHECK(r.verdict);
  }
}

TEST_CASE("envelope identity holds pathwise") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const auto u = draw_ic(rng, n);
    const double T = std::uniform_real_distribution<double>(0.0, 4.0)(rng);
    ClockField c(rng(), T);
    REQUIRE(envelope_pathwise(u, n, T, c));
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ClockField c(seed, 3.0);
    CHECK(envelope_pathwise(step(5), 5, 3.0, c));
    CHECK(envelope_pathwise(std::vector<Site>{-7}, 1, 3.0, c));
  }
}

TEST_CASE("shifted minimum lemma") {
  const std::vector<std::size_t> one{1};
  const std::vector<Site> zero{0};
  CHECK(shifted_minimum_mc(one, zero, 1.0, 0, {20000, 1, 1, 0.99}).verdict);
  const std::vector<std::size_t> both{1, 2};
  const std::vector<Site> same{3, 3};
  CHECK(shifted_minimum_mc(both, same, 1.5, 2, {20000, 2, 1, 0.99}).verdict);

  const std::vector<Site> Z{0, -2};
  const auto r = shifted_minimum_mc(both, Z, 1.0, 0, {100000, 3, 1, 0.99});
  const oracle::MasterEquation me(step(2), std::nullopt, 1.0);
  check_against_oracle(r, me.min_cdf({1, 2}, {0, -2}, 0));
  // A threshold where the probability is not degenerate.
  const auto r2 = shifted_minimum_mc(both, Z, 1.0, -3, {100000, 4, 1, 0.99});
  check_against_oracle(r2, me.min_cdf({1, 2}, {0, -2}, -3));
}

TEST_CASE("variational one-point formula") {
  const std::vector<Site> s{0, 1, 2};
  const double T = 1.0;
  const auto r1 = variational_onepoint_estimate({StepIC{0}, 1}, 1, T, s, {100000, 5, 1, 0.99});
  for (std::size_t k = 0; k < s.size(); ++k) {
    // x_1(T) is Poisson(T).
    double cdf = 0.0, term = std::exp(-T);
    for (Site j = 0; j <= s[k]; ++j) {
      cdf += term;
      term *= T / static_cast<double>(j + 1);
    }
    check_against_oracle(r1[k], 1.0 - cdf);
  }
  const std::vector<Site> s3{-3, -2, -1};
  const auto r3 = variational_onepoint_estimate({HalfPeriodicIC{2.0}, 3}, 3, 2.0, s3, {100000, 6, 1, 0.99});
  const oracle::MasterEquation me(materialize_ic({HalfPeriodicIC{2.0}, 3}, 0), std::nullopt, 2.0);
  for (std::size_t k = 0; k < s3.size(); ++k) check_against_oracle(r3[k], me.survival(3, s3[k]));
  for (const auto& r : variational_onepoint_estimate({StepIC{0}, 4}, 4, 1.0, s3, {5000, 7, 1, 0.99})) CHECK(r.verdict);
}

TEST_CASE("estimates do not depend on the thread count") {
  const PiecewiseFn kink = PiecewiseFn::from_breakpoints({{0, 0, 0}, {1, 1.5, 0}}, 0.5);
  const std::vector<Site> s{-3, -2};
  const auto a = estimate_wall_identity({HalfBernoulliIC{0.4}, 3}, &kink, 3, 2.0, s, {5000, 8, 1, 0.99});
  const auto b = estimate_wall_identity({HalfBernoulliIC{0.4}, 3}, &kink, 3, 2.0, s, {5000, 8, 4, 0.99});
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(a[k].lhs.hits == b[k].lhs.hits);
    CHECK(a[k].rhs.hits == b[k].rhs.hits);
  }
}
