#pragma once

#include <functional>
#include <stdexcept>

#include "nldiff/operators.hpp"
#include "nldiff/radial_grid.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

/// The implicit system had a zero (or non-finite) pivot.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves (I − dt·diag(φ)·Δ_h) w = rhs. Ball grids pin w(1) = 0; whole-space grids close
/// the last row with the mirror condition u'(R) = 0, which keeps the matrix tridiagonal and
/// an M-matrix for φ ≥ 0.
RadialField solve_frozen(const Potential& phi, const RadialField& rhs, double dt);

/// One backward-Euler step with diffusion coefficient and source frozen at u:
///   (I − dt·diag(φ)·Δ_h) w = u + dt·α·u².
RadialField step_frozen(const RadialField& u, const Potential& phi, double dt, double alpha);

struct PicardResult {
  RadialField w;
  int iters = 0;         ///< frozen solves performed (≤ picard_max)
  double ratio = 0.0;    ///< last ‖w⁽ʲ⁾−w⁽ʲ⁻¹⁾‖ / ‖w⁽ʲ⁻¹⁾−w⁽ʲ⁻²⁾‖, 0 if undefined
  bool converged = false;
};

/// Fixed-point iteration of step_frozen with coefficient and source re-evaluated at the
/// previous iterate, until the relative L² update drops below cfg.picard_tol.
PicardResult step_picard(const RadialField& u, const SolverConfig& cfg, double dt);

/// Clamps values in (−eps·max u, 0) to zero; more negative values are left for the caller to see.
RadialField positivity_floor(const RadialField& u, double eps_rel = 1e-13);

InitialStats initial_stats(const RadialField& u0, const SolverConfig& cfg);

using StepObserver = std::function<void(const StepReport&)>;
/// Called with each state stored in Trajectory::snapshots, as it is stored.
using SnapshotObserver = std::function<void(const SolverState&)>;

/// Adaptive time integration from u0 to cfg.t_end (or divergence / tail breach).
Trajectory run(const RadialField& u0, const SolverConfig& cfg, const StepObserver& observer = {},
               const SnapshotObserver& on_snapshot = {});

/// Continues from a stored state. The returned trajectory holds only the new steps.
Trajectory resume(const SolverState& from, const InitialStats& u0_stats, const SolverConfig& cfg,
                  const StepObserver& observer = {}, const SnapshotObserver& on_snapshot = {});

}  // namespace nldiff
