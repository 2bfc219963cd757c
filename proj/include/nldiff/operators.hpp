#pragma once

#include <vector>

#include "nldiff/radial_grid.hpp"

namespace nldiff {

/// φ = (−Δ)⁻¹u for a radial source, with its radial derivative.
struct Potential {
  GridPtr grid;
  std::vector<double> phi;
  std::vector<double> dphi_dr;
  double mass = 0.0;  ///< ∫u dx under the potential's own product rule; r·φ → mass/4π

  double max() const;
};

/// Newton formula for radial data supported in [0, R]:
///   φ(r) = (1/r)∫₀^r u ρ² dρ + ∫_r^R u ρ dρ,   ∂_r φ = −r⁻² ∫₀^r u ρ² dρ,
/// with both integrals accumulated as prefix sums over cells, each cell integrating the
/// piecewise-linear interpolant of u exactly.
Potential inverse_laplacian_free(const RadialField& u);

/// Dirichlet inverse on the unit ball: −Δφ = u, φ(1) = 0.
/// Equals the free-space formula minus its value at r = 1.
Potential inverse_laplacian_ball(const RadialField& u);

/// Dispatches on the grid's domain kind.
Potential inverse_laplacian(const RadialField& u);

/// Second-order finite-difference u'' + (2/r)u'.
/// At r = 0 uses the symmetric limit 6(u₁ − u₀)/h²; at r = R a one-sided second-order stencil.
RadialField laplacian_radial(const RadialField& u);

/// max over interior nodes of |Δ_h (−Δ)⁻¹u + u|.
double potential_roundtrip_residual(const RadialField& u);

}  // namespace nldiff
