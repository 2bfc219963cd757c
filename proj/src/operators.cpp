#include "nldiff/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nldiff {

double Potential::max() const {
  return phi.empty() ? 0.0 : *std::max_element(phi.begin(), phi.end());
}

namespace {

Potential newton_potential(const RadialField& u) {
  const auto& grid = u.grid();
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const auto v = u.values();

  // inner[i] = ∫₀^{r_i} u ρ² dρ, outer[i] = ∫_{r_i}^R u ρ dρ.
  std::vector<long double> inner(n, 0.0L);
  std::vector<long double> outer(n, 0.0L);
  std::vector<long double> cell1(n, 0.0L);
  // Cell increments integrate the piecewise-linear interpolant of u exactly against ρ² and ρ.
  // With midpoint m, the left/right nodal weights are m²h/2 + h³/24 ∓ mh²/6 (ρ²) and
  // mh/2 ∓ h²/12 (ρ).
  const long double hl = h;
  for (std::size_t i = 1; i < n; ++i) {
    const long double m = 0.5L * (static_cast<long double>(grid.r(i - 1)) + grid.r(i));
    const long double base2 = m * m * hl / 2 + hl * hl * hl / 24;
    const long double skew2 = m * hl * hl / 6;
    const long double base1 = m * hl / 2;
    const long double skew1 = hl * hl / 12;
    inner[i] = inner[i - 1] + (base2 - skew2) * v[i - 1] + (base2 + skew2) * v[i];
    cell1[i] = (base1 - skew1) * v[i - 1] + (base1 + skew1) * v[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) outer[i] = outer[i + 1] + cell1[i + 1];

  Potential p;
  p.grid = u.grid_ptr();
  p.phi.resize(n);
  p.dphi_dr.resize(n);
  p.phi[0] = static_cast<double>(outer[0]);
  p.dphi_dr[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const long double r = grid.r(i);
    p.phi[i] = static_cast<double>(inner[i] / r + outer[i]);
    p.dphi_dr[i] = static_cast<double>(-inner[i] / (r * r));
  }
  // Mass as seen by the same product rule, so r·φ → mass/(4π) holds to rounding.
  p.mass = static_cast<double>(4.0L * std::numbers::pi_v<long double> * inner[n - 1]);
  return p;
}

}  // namespace

Potential inverse_laplacian_free(const RadialField& u) {
  if (u.grid().kind() != DomainKind::WholeSpaceTruncated) {
    throw std::invalid_argument("inverse_laplacian_free: wrong domain kind (needs whole_space)");
  }
  return newton_potential(u);
}

Potential inverse_laplacian_ball(const RadialField& u) {
  if (u.grid().kind() != DomainKind::Ball) {
    throw std::invalid_argument("inverse_laplacian_ball: wrong domain kind (needs ball)");
  }
  // The free-space potential differs from the Dirichlet one by the constant φ_free(1).
  Potential p = newton_potential(u);
  const double boundary = p.phi.back();
  for (double& x : p.phi) x -= boundary;
  p.phi.back() = 0.0;
  return p;
}

Potential inverse_laplacian(const RadialField& u) {
  return u.grid().kind() == DomainKind::Ball ? inverse_laplacian_ball(u)
                                              : inverse_laplacian_free(u);
}

RadialField laplacian_radial(const RadialField& u) {
  const auto& grid = u.grid();
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double h2 = h * h;
  RadialField out(u.grid_ptr());
  out[0] = 6.0 * (u[1] - u[0]) / h2;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double second = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    const double first = (u[i + 1] - u[i - 1]) / (2.0 * h);
    out[i] = second + 2.0 / grid.r(i) * first;
  }
  const std::size_t k = n - 1;
  const double second = (2.0 * u[k] - 5.0 * u[k - 1] + 4.0 * u[k - 2] - u[k - 3]) / h2;
  const double first = (3.0 * u[k] - 4.0 * u[k - 1] + u[k - 2]) / (2.0 * h);
  out[k] = second + 2.0 / grid.r(k) * first;
  return out;
}

double potential_roundtrip_residual(const RadialField& u) {
  const Potential p = inverse_laplacian(u);
  const RadialField lap = laplacian_radial(RadialField(u.grid_ptr(), p.phi));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) worst = std::max(worst, std::abs(lap[i] + u[i]));
  return worst;
}

}  // namespace nldiff
