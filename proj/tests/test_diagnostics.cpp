#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nldiff/diagnostics.hpp"
#include "nldiff/operators.hpp"
#include "nldiff/stepper.hpp"
#include "oracles.hpp"

using namespace nldiff;

namespace {

template <typename F>
RadialField sample(const GridPtr& g, F f) {
  RadialField u(g);
  for (std::size_t i = 0; i < g->size(); ++i) u[i] = f(g->r(i));
  return u;
}

Trajectory synthetic(double alpha, std::vector<double> l1, std::vector<double> l2, double dt) {
  Trajectory traj;
  traj.config.alpha = alpha;
  traj.u0_stats.l1 = l1.front();
  traj.u0_stats.l2 = l2.front();
  for (std::size_t k = 1; k < l1.size(); ++k) {
    StepReport rep;
    rep.t = dt * static_cast<double>(k);
    rep.dt = dt;
    rep.l1 = l1[k];
    rep.l2 = l2[k];
    traj.reports.push_back(rep);
  }
  return traj;
}

}  // namespace

TEST_CASE("japanese bracket") {
  CHECK(japanese_bracket(0.0) == 1.0);
  CHECK(japanese_bracket(std::sqrt(3.0)) == doctest::Approx(2.0));
}

TEST_CASE("mass_balance_residual: zero data, empty input and the alpha = 1 identity") {
  CHECK(mass_balance_residual(synthetic(0.4, {0, 0, 0}, {0, 0, 0}, 0.1), 0.2) == 0.0);
  CHECK_THROWS_AS(mass_balance_residual(Trajectory{}, 1.0), std::invalid_argument);
  const auto traj = synthetic(1.0, {2.0, 1.9, 1.7}, {5.0, 4.0, 3.0}, 0.1);
  CHECK(mass_balance_residual(traj, 0.2) == doctest::Approx(0.15));
  CHECK(mass_balance_residual(traj, 0.1) == doctest::Approx(0.05));
}

TEST_CASE("mass_balance_residual uses trapezoid-in-time for the square integral") {
  // ∫u = 1 − 0.6·(trapezoid of ∫u²) exactly ⇒ residual 0.
  const double dt = 0.5;
  const double q = 0.5 * dt * (1.0 + 0.81);
  const auto traj = synthetic(0.4, {1.0, 1.0 - 0.6 * q}, {1.0, 0.9}, dt);
  CHECK(mass_balance_residual(traj, 0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("mass_balance_residual of a run is zero at t = 0 and small at t = 1") {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 257, 8.0);
  const auto traj = run(sample(g, [](double r) { return std::exp(-r * r); }), cfg);
  CHECK(mass_balance_residual(traj, 0.0) == 0.0);
  CHECK(mass_balance_residual(traj, 1.0) <= 1e-3);
  CHECK(mass_balance_residual(traj, 1.0) == doctest::Approx(traj.reports.back().mass_balance_residual).epsilon(1e-9));
}

TEST_CASE("potential bounds for the unit-ball indicator") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 2049, 4.0);
  const auto u = sample(g, [](double r) { return r < 1.0 ? 1.0 : (r == 1.0 ? 0.5 : 0.0); });
  const double a0 = annulus_mass(u, 0.5);
  CHECK(a0 == doctest::Approx(oracle::kIndicatorAnnulusMass).epsilon(1e-5));
  const auto b = potential_bounds_check(u, 0.5, a0);
  CHECK(b.minorant == doctest::Approx(oracle::kIndicatorMinorant).epsilon(1e-5));
  CHECK(b.d2_est == doctest::Approx(oracle::kIndicatorMinPhiBracketR4).epsilon(1e-5));
  CHECK(b.d2_est >= 1.0 / 6.0);
  CHECK(b.d1_est == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(b.ok);

  RadialField twice(g);
  for (std::size_t i = 0; i < g->size(); ++i) twice[i] = 2.0 * u[i];
  const auto b2 = potential_bounds_check(twice, 0.5, a0);
  CHECK(b2.d1_est == 2.0 * b.d1_est);
  CHECK(b2.d2_est == 2.0 * b.d2_est);

  CHECK_THROWS_AS(potential_bounds_check(RadialField(g), 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(potential_bounds_check(u, 1.5, a0), std::invalid_argument);
}

TEST_CASE("D2 estimate is stable under refinement") {
  const auto gauss = [](double r) { return std::exp(-r * r); };
  double d2[3];
  int k = 0;
  for (std::size_t n : {257u, 513u, 1025u}) {
    const auto u = sample(make_grid(DomainKind::WholeSpaceTruncated, n, 8.0), gauss);
    d2[k++] = potential_bounds_check(u, 0.5, annulus_mass(u, 0.5)).d2_est;
  }
  const double ratio = (d2[0] - d2[1]) / (d2[1] - d2[2]);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("pointwise monotone bound examples") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 1025, 4.0);
  const auto c = pointwise_monotone_bound(RadialField(g, std::vector<double>(g->size(), 2.5)), 0.7);
  CHECK(std::abs(c.excess) <= 1e-13);
  CHECK(c.input_monotone);

  const auto gauss = pointwise_monotone_bound(sample(g, [](double r) { return std::exp(-r * r); }), 1.0);
  const double oracle_moment = oracle::integral([](double r) { return std::exp(-r * r) * r * r; }, 0.0, 1.0);
  CHECK(oracle_moment == doctest::Approx(oracle::kGaussianR2Moment01).epsilon(1e-12));
  CHECK(gauss.excess == doctest::Approx(std::exp(-1.0) - 3.0 * oracle::kGaussianR2Moment01).epsilon(1e-5));
  CHECK(gauss.excess < 0.0);

  CHECK(pointwise_monotone_bound(RadialField(g), 0.5).excess == 0.0);
  CHECK_FALSE(pointwise_monotone_bound(sample(g, [](double r) { return r; }), 0.5).input_monotone);
}

TEST_CASE("pointwise monotone bound holds for random non-increasing fields") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = make_grid(DomainKind::WholeSpaceTruncated, 16 + trial % 200, 1.0 + 4.0 * unit(rng));
    std::vector<double> v(g->size());
    for (auto& x : v) x = unit(rng) * (trial % 5 ? 1.0 : 1e-3);
    std::sort(v.begin(), v.end(), std::greater<>());
    const RadialField u(g, v);
    const double r0 = g->radius() * (0.01 + 0.99 * unit(rng));
    const auto b = pointwise_monotone_bound(u, r0);
    CHECK(b.input_monotone);
    CHECK(b.excess <= 1e-10 * u.max());
  }
}

TEST_CASE("weighted_h2 examples") {
  const auto g = make_grid(DomainKind::Ball, 1025);
  CHECK(weighted_h2(RadialField(g)) == 0.0);
  const auto u = sample(g, [](double r) { return 1.0 - r * r / 6.0; });
  const double oracle_value = std::sqrt(4.0 * std::numbers::pi *
                                        oracle::integral([](double r) { return std::sqrt(1 + r * r) * r * r; }, 0.0, 1.0));
  CHECK(oracle_value == doctest::Approx(oracle::kWeightedH2Quadratic).epsilon(1e-12));
  CHECK(weighted_h2(u) == doctest::Approx(oracle::kWeightedH2Quadratic).epsilon(1e-5));
  RadialField twice(g);
  for (std::size_t i = 0; i < g->size(); ++i) twice[i] = 2.0 * u[i];
  CHECK(weighted_h2(twice) == doctest::Approx(2.0 * weighted_h2(u)).epsilon(1e-14));
}

TEST_CASE("tail guard examples") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 513, 8.0);
  CHECK(tail_guard(sample(g, [](double r) { return std::exp(-r * r); })));
  CHECK_FALSE(tail_guard(RadialField(g, std::vector<double>(g->size(), 1.0))));
  CHECK_FALSE(tail_guard(sample(g, [](double r) { return r <= 8.0 ? 1.0 : 0.0; })));
}

TEST_CASE("monotonicity and positivity predicates") {
  const auto g = make_grid(DomainKind::Ball, 9);
  CHECK(is_non_increasing(RadialField(g, {4, 3, 3, 2, 1, 1, 0, 0, 0}), 0.0));
  CHECK_FALSE(is_non_increasing(RadialField(g, {4, 3, 3.1, 2, 1, 1, 0, 0, 0}), 1e-8));
  CHECK(is_non_increasing(RadialField(g, {4, 3, 3 + 1e-9, 2, 1, 1, 0, 0, 0}), 1e-8));
  CHECK(is_non_negative(RadialField(g)));
  CHECK_FALSE(is_non_negative(RadialField(g, {1, 0, 0, 0, 0, 0, 0, 0, -1e-300})));
}

TEST_CASE("decay tracker: zero trajectory, burn-in, regime flags") {
  auto zero = synthetic(0.4, {0, 0, 0, 0}, {0, 0, 0, 0}, 0.1);
  const auto z = decay_tracker(zero, 2.0);
  CHECK(z.monotone_after_burnin);
  CHECK(z.terminal_ratio == 0.0);
  CHECK(z.in_regime);

  // One early rise inside the 1% burn-in (k = 0) is ignored; a later one is not.
  std::vector<double> l2(201);
  for (std::size_t k = 0; k < l2.size(); ++k) l2[k] = 1.0 / (1.0 + 0.01 * static_cast<double>(k));
  l2[1] = 1.5;
  auto early = synthetic(0.4, std::vector<double>(201, 1.0), l2, 0.01);
  CHECK(decay_tracker(early, 2.0).monotone_after_burnin);
  l2[150] = 1.0;
  auto late = synthetic(0.4, std::vector<double>(201, 1.0), l2, 0.01);
  CHECK_FALSE(decay_tracker(late, 2.0).monotone_after_burnin);

  auto mid = synthetic(0.6, {1, 1}, {1, 0.5}, 0.1);
  CHECK_FALSE(decay_tracker(mid, 2.0).in_regime);
  CHECK(decay_tracker(mid, 2.0).terminal_ratio == 0.5);
  CHECK_THROWS_AS(lq_series(mid, 1.7), std::invalid_argument);
}

TEST_CASE("alpha = 0.4 run decays in L2 with terminal ratio below one") {
  SolverConfig cfg;
  cfg.t_end = 5.0;
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 513, 8.0);
  const auto traj = run(sample(g, [](double r) { return std::exp(-r * r); }), cfg);
  REQUIRE(traj.status == StepStatus::Ok);
  const auto trend = decay_tracker(traj, 2.0);
  CHECK(trend.monotone_after_burnin);
  CHECK(trend.terminal_ratio < 1.0);
  CHECK(lq_series(traj, 2.0).size() == traj.reports.size() + 1);
}

TEST_CASE("comparison blow-up time") {
  CHECK(comparison_blowup_time(1.5, oracle::kParabolicMass).value() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_FALSE(comparison_blowup_time(1.0, 1.0).has_value());
  CHECK_FALSE(comparison_blowup_time(2.0, 0.0).has_value());
}
