#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "nldiff/operators.hpp"
#include "nldiff/radial_grid.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

/// ⟨r⟩ = (1 + r²)^{1/2}.
inline double japanese_bracket(double r) { return std::sqrt(1.0 + r * r); }

/// Relative mass-identity defect |∫u(t) + (1−α)∫₀ᵗ∫u² − ∫u₀| / ∫u₀ at the last report with
/// t ≤ upto. The time integral is the trapezoid rule over the reported ∫u². Zero when ∫u₀ = 0.
double mass_balance_residual(const Trajectory& traj, double upto);

/// ∫_{r0 < |x| < 1/r0} u dx (piecewise-linear interpolant, so r0 need not be a node).
double annulus_mass(const RadialField& u, double r0);

struct PotentialBounds {
  double d1_est = 0.0;  ///< max φ
  double d2_est = 0.0;  ///< min φ(r)·⟨r⟩
  double minorant = 0.0;  ///< A0·r0/(8π)
  bool ok = false;
};

/// Two-sided potential bound: D1 = max φ and the lower envelope φ⟨r⟩ ≥ A0·r0/(8π).
/// Throws std::invalid_argument when A0 ≤ 0.
PotentialBounds potential_bounds_check(const RadialField& u, double r0, double A0);
PotentialBounds potential_bounds_check(const Potential& phi, double r0, double A0);

struct MonotoneBound {
  double excess = 0.0;  ///< u(r0) − 3·D3/r0³, must be ≤ tol
  bool input_monotone = true;
};

/// Pointwise bound for non-increasing data: u(r0) ≤ 3 D3 / r0³ with D3 = ∫₀^{r0} u ρ² dρ.
MonotoneBound pointwise_monotone_bound(const RadialField& u, double r0);

/// ‖⟨r⟩^{1/2} Δ_h u‖_{L²}.
double weighted_h2(const RadialField& u);

/// True iff u on the outermost tail_fraction of nodes is ≤ tol·max u.
bool tail_guard(const RadialField& u, double tail_fraction = 0.02, double tol = 1e-10);

/// max_i (u[i+1] − u[i]) ≤ tol·max u.
bool is_non_increasing(const RadialField& u, double tol);
bool is_non_negative(const RadialField& u);

struct DecayTrend {
  bool monotone_after_burnin = true;
  double terminal_ratio = 0.0;
  bool in_regime = true;  ///< q inside the range the decay theorems cover for this α
};

/// L^q series of a trajectory, starting with the initial datum. q must be 1, 2, 2+δ,
/// or one of config.tracked_q; throws std::invalid_argument otherwise.
std::vector<double> lq_series(const Trajectory& traj, double q);

/// Non-increase of the L^q series after a 1% burn-in (per-step relative tolerance
/// `tol`) and the terminal ratio ‖u(t_end)‖/‖u₀‖ (0 when ‖u₀‖ = 0).
DecayTrend decay_tracker(const Trajectory& traj, double q, double tol = 1e-8);

/// Blow-up time of the comparison ODE M' = (α−1)M²/|B₁|, M(0) = M0.
/// Empty when α ≤ 1 or M0 ≤ 0.
std::optional<double> comparison_blowup_time(double alpha, double M0);

}  // namespace nldiff
