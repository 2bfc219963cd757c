#include <doctest.h>

#include <cmath>
#include <random>

#include "nldiff/operators.hpp"
#include "oracles.hpp"

using namespace nldiff;

namespace {

template <typename F>
RadialField sample(const GridPtr& g, F f) {
  RadialField u(g);
  for (std::size_t i = 0; i < g->size(); ++i) u[i] = f(g->r(i));
  return u;
}

RadialField unit_indicator(const GridPtr& g) {
  return sample(g, [](double r) { return r < 1.0 ? 1.0 : (r == 1.0 ? 0.5 : 0.0); });
}

std::size_t node(const RadialGrid& g, double r) { return static_cast<std::size_t>(std::lround(r / g.spacing())); }

}  // namespace

TEST_CASE("indicator potential matches the Newton closed form at second order") {
  double prev[3] = {0, 0, 0};
  const double where[3] = {0.0, 1.0, 2.0};
  for (std::size_t n : {1025u, 2049u, 4097u}) {
    const auto g = make_grid(DomainKind::WholeSpaceTruncated, n, 4.0);
    const auto p = inverse_laplacian_free(unit_indicator(g));
    for (int k = 0; k < 3; ++k) {
      const double err = std::abs(p.phi[node(*g, where[k])] - oracle::indicator_potential(where[k]));
      CHECK(err <= 1e-4);
      if (prev[k] > 0.0) {
        const double order = std::log2(prev[k] / err);
        CHECK(order >= 1.8);
        CHECK(order <= 2.2);
      }
      prev[k] = err;
    }
  }
}

TEST_CASE("zero source gives zero potential on both domains") {
  for (auto kind : {DomainKind::WholeSpaceTruncated, DomainKind::Ball}) {
    const auto g = make_grid(kind, 33);
    const auto p = inverse_laplacian(RadialField(g));
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(p.phi[i] == 0.0);
      CHECK(p.dphi_dr[i] == 0.0);
    }
    CHECK(potential_roundtrip_residual(RadialField(g)) == 0.0);
  }
}

TEST_CASE("Gaussian potential: centre value and far field") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 1025, 8.0);
  const auto p = inverse_laplacian_free(sample(g, [](double r) { return std::exp(-r * r); }));
  const double phi0 = oracle::integral([](double r) { return std::exp(-r * r) * r; }, 0.0, 8.0);
  CHECK(phi0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(p.phi[0] - 0.5) <= 1e-4);
  for (std::size_t i = node(*g, 6.0); i < g->size(); ++i) {
    CHECK(std::abs(g->r(i) * p.phi[i] - oracle::kGaussianFarField) <= 1e-4);
  }
  CHECK(p.dphi_dr[0] == 0.0);
}

TEST_CASE("far-field law for compactly supported sources") {
  const double R = 8.0;
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 513, R);
  const auto u = sample(g, [](double r) { return r <= 3.0 ? std::pow(1.0 - r * r / 9.0, 3) : 0.0; });
  const auto p = inverse_laplacian_free(u);
  CHECK(p.mass > 0.0);
  CHECK(p.mass == doctest::Approx(integrate(u)).epsilon(1e-3));
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (g->r(i) < 0.75 * R) continue;
    CHECK(std::abs(g->r(i) * p.phi[i] - p.mass / (4.0 * std::numbers::pi)) <= 1e-10 * p.mass);
  }
}

TEST_CASE("ball Green's function for constant sources") {
  const auto g = make_grid(DomainKind::Ball, 2049);
  const auto p = inverse_laplacian_ball(RadialField(g, std::vector<double>(g->size(), 1.0)));
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->r(i);
    worst = std::max(worst, std::abs(p.phi[i] - (1.0 - r * r) / 6.0));
    CHECK(p.dphi_dr[i] == doctest::Approx(-r / 3.0).epsilon(1e-9));
  }
  CHECK(worst <= 1e-6);
  CHECK(p.phi.back() == 0.0);
  CHECK(p.phi[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("ball roundtrip for 1 - r^2 is second order") {
  double prev = 0.0;
  for (std::size_t n : {129u, 257u, 513u}) {
    const auto g = make_grid(DomainKind::Ball, n);
    const double res = potential_roundtrip_residual(sample(g, [](double r) { return 1.0 - r * r; }));
    CHECK(res <= g->spacing() * g->spacing());
    if (prev > 0.0) CHECK(std::log2(prev / res) == doctest::Approx(2.0).epsilon(0.1));
    prev = res;
  }
}

TEST_CASE("operators reject the wrong domain") {
  CHECK_THROWS_AS(inverse_laplacian_free(RadialField(make_grid(DomainKind::Ball, 17))), std::invalid_argument);
  CHECK_THROWS_AS(inverse_laplacian_ball(RadialField(make_grid(DomainKind::WholeSpaceTruncated, 17, 2.0))),
                  std::invalid_argument);
}

TEST_CASE("laplacian_radial examples") {
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 1025, 4.0);
  const auto lap = laplacian_radial(sample(g, [](double r) { return std::exp(-r * r); }));
  CHECK(std::abs(lap[0] + 6.0) <= 10.0 * g->spacing() * g->spacing());
  for (std::size_t i = 1; i + 1 < g->size(); i += 37) {
    const double r = g->r(i);
    CHECK(std::abs(lap[i] - (4.0 * r * r - 6.0) * std::exp(-r * r)) <= 10.0 * g->spacing() * g->spacing());
  }
  const auto flat = laplacian_radial(RadialField(g, std::vector<double>(g->size(), 3.5)));
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(flat[i]) <= 1e-9);
  const auto quad = laplacian_radial(sample(g, [](double r) { return 1.0 - r * r / 6.0; }));
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(quad[i] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("Gaussian roundtrip residual is small and quarters under refinement") {
  const auto gauss = [](double r) { return std::exp(-r * r); };
  const double coarse = potential_roundtrip_residual(sample(make_grid(DomainKind::WholeSpaceTruncated, 1025, 8.0), gauss));
  const double fine = potential_roundtrip_residual(sample(make_grid(DomainKind::WholeSpaceTruncated, 2049, 8.0), gauss));
  CHECK(coarse <= 1e-3);
  CHECK(fine / coarse >= 0.25 / 1.5);
  CHECK(fine / coarse <= 0.25 * 1.5);
}

TEST_CASE("potential of a non-negative source is non-negative and non-increasing") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto kind = trial % 2 ? DomainKind::Ball : DomainKind::WholeSpaceTruncated;
    const auto g = make_grid(kind, 64 + trial, kind == DomainKind::Ball ? 1.0 : 5.0);
    RadialField u(g);
    for (std::size_t i = 0; i < g->size(); ++i) u[i] = unit(rng) * unit(rng);
    const auto p = inverse_laplacian(u);
    const double top = p.max();
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(p.phi[i] >= 0.0);
      if (i) CHECK(p.phi[i] - p.phi[i - 1] <= 1e-12 * top);
    }
  }
}

TEST_CASE("inverse Laplacian is linear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto kind : {DomainKind::WholeSpaceTruncated, DomainKind::Ball}) {
    const auto g = make_grid(kind, 301, kind == DomainKind::Ball ? 1.0 : 4.0);
    for (int trial = 0; trial < 20; ++trial) {
      RadialField u(g), v(g), mix(g);
      const double a = 3.0 * unit(rng), b = 3.0 * unit(rng);
      for (std::size_t i = 0; i < g->size(); ++i) {
        u[i] = unit(rng);
        v[i] = unit(rng);
        mix[i] = a * u[i] + b * v[i];
      }
      const auto pu = inverse_laplacian(u), pv = inverse_laplacian(v), pm = inverse_laplacian(mix);
      double scale = 1.0;
      for (std::size_t i = 0; i < g->size(); ++i) scale = std::max(scale, std::abs(pm.phi[i]));
      for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(std::abs(pm.phi[i] - (a * pu.phi[i] + b * pv.phi[i])) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("two-sided bound: phi dominates A0 / (4 pi <r>) min(1, r0/2)") {
  const double r0 = 0.5;
  const auto g = make_grid(DomainKind::WholeSpaceTruncated, 801, 8.0);
  const auto u = sample(g, [](double r) { return 1.0 / std::pow(1.0 + r * r, 3); });
  const auto p = inverse_laplacian_free(u);
  const double a0 = 4.0 * std::numbers::pi *
                    oracle::integral([](double r) { return r * r / std::pow(1.0 + r * r, 3); }, r0, 1.0 / r0);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->r(i);
    CHECK(p.phi[i] >= a0 / (4.0 * std::numbers::pi * std::sqrt(1.0 + r * r)) * std::min(1.0, r0 / 2.0));
  }
}
