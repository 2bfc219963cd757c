#include <doctest.h>

#include <cmath>
#include <random>

#include "nldiff/diagnostics.hpp"
#include "nldiff/operators.hpp"
#include "nldiff/scenarios.hpp"
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

double l2_distance(const RadialField& a, const RadialField& b) {
  RadialField d(a.grid_ptr());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return lq_norm(d, 2.0);
}

RadialField gaussian(std::size_t n = 257, double R = 8.0) {
  return sample(make_grid(DomainKind::WholeSpaceTruncated, n, R), [](double r) { return std::exp(-r * r); });
}

SolverConfig fixed_dt(double alpha, double dt, double t_end) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.dt0 = cfg.dt_min = cfg.dt_max = dt;
  cfg.t_end = t_end;
  return cfg;
}

}  // namespace

TEST_CASE("zero is a fixed point of every step") {
  for (auto kind : {DomainKind::WholeSpaceTruncated, DomainKind::Ball}) {
    const RadialField zero(make_grid(kind, 65, kind == DomainKind::Ball ? 1.0 : 4.0));
    const auto phi = inverse_laplacian(zero);
    for (double dt : {1e-4, 1.0}) {
      const auto w = step_frozen(zero, phi, dt, 1.3);
      CHECK(w.max() == 0.0);
      CHECK(w.min() == 0.0);
      SolverConfig cfg;
      const auto pr = step_picard(zero, cfg, dt);
      CHECK(pr.iters == 1);
      CHECK(pr.converged);
      CHECK(pr.w.max() == 0.0);
    }
  }
}

TEST_CASE("with alpha = 0 a step strictly loses mass") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 257, 6.0);
  const auto u = sample(g, [](double r) { return r < 1.0 ? std::pow(1.0 - r * r, 4) : 0.0; });
  const auto w = step_frozen(u, inverse_laplacian(u), 1e-2, 0.0);
  CHECK(integrate(w) < integrate(u));
  // d/dt ∫u = −∫u² predicts the loss to first order in dt.
  const double predicted = 1e-2 * std::pow(lq_norm(u, 2.0), 2);
  CHECK((integrate(u) - integrate(w)) == doctest::Approx(predicted).epsilon(0.1));
}

TEST_CASE("step doubling: one step versus two half steps differ at O(dt^2)") {
  const auto u = gaussian();
  const auto phi = inverse_laplacian(u);
  double prev = 0.0;
  for (double dt : {4e-2, 2e-2, 1e-2, 5e-3}) {
    const auto one = step_frozen(u, phi, dt, 0.4);
    const auto half = step_frozen(u, phi, dt / 2, 0.4);
    const auto two = step_frozen(half, inverse_laplacian(half), dt / 2, 0.4);
    const double diff = l2_distance(one, two);
    if (prev > 0.0) CHECK(std::log2(prev / diff) == doctest::Approx(2.0).epsilon(0.1));
    prev = diff;
  }
}

TEST_CASE("picard_max = 1 reproduces step_frozen exactly") {
  const auto u = gaussian();
  SolverConfig cfg;
  cfg.alpha = 0.7;
  cfg.picard_max = 1;
  const auto pr = step_picard(u, cfg, 1e-2);
  const auto w = step_frozen(u, inverse_laplacian(u), 1e-2, 0.7);
  CHECK(pr.iters == 1);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(pr.w[i] == w[i]);
}

TEST_CASE("Picard iteration contracts for small dt") {
  const auto u = gaussian();
  SolverConfig cfg;
  cfg.alpha = 0.4;
  const auto pr = step_picard(u, cfg, 1e-3);
  CHECK(pr.converged);
  CHECK(pr.iters <= cfg.picard_max);
  CHECK(pr.ratio < 0.5);
}

TEST_CASE("random positive inputs give non-negative output (M-matrix)") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto kind = trial % 3 ? DomainKind::WholeSpaceTruncated : DomainKind::Ball;
    const auto g = make_grid(kind, 8 + trial, kind == DomainKind::Ball ? 1.0 : 2.0 + trial * 0.01);
    RadialField u(g);
    Potential phi;
    phi.grid = g;
    phi.phi.resize(g->size());
    phi.dphi_dr.assign(g->size(), 0.0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      u[i] = unit(rng);
      phi.phi[i] = 100.0 * unit(rng);
    }
    const double dt = std::pow(10.0, -5.0 + 4.0 * unit(rng));
    const auto w = step_frozen(u, phi, dt, unit(rng));
    CHECK(w.min() >= -1e-12 * u.max());
    if (kind == DomainKind::Ball) CHECK(w[g->size() - 1] == 0.0);
  }
}

TEST_CASE("step_frozen rejects non-positive dt and mismatched grids") {
  const auto u = gaussian();
  CHECK_THROWS_AS(step_frozen(u, inverse_laplacian(u), 0.0, 0.4), std::invalid_argument);
  const auto other = gaussian(129);
  CHECK_THROWS_AS(step_frozen(u, inverse_laplacian(other), 1e-3, 0.4), GridMismatch);
}

TEST_CASE("positivity_floor clamps only roundoff-sized negatives") {
  const auto g = make_grid(DomainKind::Ball, 9);
  RadialField u(g, {1, 0.5, 0.25, 0.1, 0, 0, 0, 0, 0});
  const auto same = positivity_floor(u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(same[i] == u[i]);
  u[4] = -1e-15;
  CHECK(positivity_floor(u)[4] == 0.0);
  u[4] = -1e-6;
  const auto kept = positivity_floor(u);
  CHECK(kept[4] == -1e-6);
  CHECK_FALSE(is_non_negative(kept));
}

TEST_CASE("run on zero data stays zero") {
  SolverConfig cfg;
  cfg.t_end = 0.1;
  const auto traj = run(RadialField(make_grid(DomainKind::WholeSpaceTruncated, 65, 4.0)), cfg);
  CHECK(traj.status == StepStatus::Ok);
  REQUIRE_FALSE(traj.reports.empty());
  for (const auto& rep : traj.reports) {
    CHECK(rep.l1 == 0.0);
    CHECK(rep.linf == 0.0);
    CHECK(rep.mass_balance_residual == 0.0);
  }
  CHECK(traj.final_time() == doctest::Approx(0.1));
}

TEST_CASE("alpha = 0.4 Gaussian run: mass identity, monotone profile, reports well-formed") {
  SolverConfig cfg;
  cfg.alpha = 0.4;
  cfg.t_end = 1.0;
  const auto traj = run(gaussian(513), cfg);
  CHECK(traj.status == StepStatus::Ok);
  CHECK(traj.final_time() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(traj.reports.back().mass_balance_residual <= 1e-3);
  double t = 0.0;
  for (const auto& rep : traj.reports) {
    CHECK(rep.t > t);
    t = rep.t;
    CHECK(rep.monotone_ok);
    CHECK(rep.positive_ok);
    CHECK(rep.tail_ok);
    CHECK(rep.picard_iters <= cfg.picard_max);
    CHECK(rep.l1 >= 0.0);
  }
  CHECK(traj.warnings.empty());
}

TEST_CASE("mass-identity defect shrinks in proportion to dt") {
  const auto u0 = gaussian(257);
  const double coarse = run(u0, fixed_dt(0.4, 2e-3, 0.5)).reports.back().mass_balance_residual;
  const double fine = run(u0, fixed_dt(0.4, 1e-3, 0.5)).reports.back().mass_balance_residual;
  CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("ball blow-up for alpha = 1.5 before the comparison time") {
  SolverConfig cfg;
  cfg.alpha = 1.5;
  cfg.t_end = 10.0;
  const auto init = make_initial({.family = Family::Parabolic}, make_grid(DomainKind::Ball, 257));
  const auto traj = run(init.field, cfg);
  CHECK(traj.status == StepStatus::Diverged);
  CHECK(traj.final_time() < oracle::comparison_time(1.5, oracle::kParabolicMass));
  CHECK(oracle::comparison_time(1.5, oracle::kParabolicMass) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_FALSE(traj.reason.empty());
}

TEST_CASE("run warns about non-monotone data and validates the config") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 65, 8.0);
  const auto bumpy = sample(g, [](double r) { return std::exp(-(r - 1.0) * (r - 1.0)) * std::exp(-r * r); });
  SolverConfig cfg;
  cfg.t_end = 0.01;
  CHECK_FALSE(run(bumpy, cfg).warnings.empty());
  cfg.dt_min = 1.0;
  CHECK_THROWS_AS(run(bumpy, cfg), ConfigError);
}

TEST_CASE("dt adapts: doubles after clean steps up to dt_max") {
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.dt0 = 1e-3;
  cfg.dt_max = 8e-3;
  const auto traj = run(gaussian(), cfg);
  double biggest = 0.0;
  for (const auto& rep : traj.reports) biggest = std::max(biggest, rep.dt);
  CHECK(biggest == doctest::Approx(8e-3));
  CHECK(traj.reports[0].dt == doctest::Approx(1e-3));
  CHECK(traj.reports[cfg.grow_after].dt == doctest::Approx(2e-3));
}

TEST_CASE("a wide datum on a short domain trips the tail guard") {
  SolverConfig cfg;
  cfg.t_end = 5.0;
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 129, 4.5);
  const auto u = sample(g, [](double r) { return std::exp(-r * r); });
  const auto traj = run(u, cfg);
  CHECK(traj.status == StepStatus::TailBreach);
  CHECK_FALSE(traj.reports.back().tail_ok);
}

TEST_CASE("resume from a stored state reproduces the uninterrupted run") {
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.snapshot_stride = 20;
  const auto full = run(gaussian(), cfg);
  REQUIRE(full.snapshots.size() >= 3);
  const auto& mid = full.snapshots[1];
  const auto rest = resume(mid, full.u0_stats, cfg);
  REQUIRE_FALSE(rest.reports.empty());
  CHECK(rest.reports.back().l2 == full.reports.back().l2);
  CHECK(rest.reports.back().t == full.reports.back().t);
  CHECK(rest.reports.size() + mid.step == full.reports.size());
}
