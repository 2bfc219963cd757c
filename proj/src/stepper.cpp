#include "nldiff/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nldiff/diagnostics.hpp"

namespace nldiff {

std::string to_string(StepStatus status) {
  switch (status) {
    case StepStatus::Ok: return "Ok";
    case StepStatus::Diverged: return "Diverged";
    case StepStatus::TailBreach: return "TailBreach";
  }
  return "Ok";
}

StepStatus step_status_from_string(const std::string& name) {
  if (name == "Ok") return StepStatus::Ok;
  if (name == "Diverged") return StepStatus::Diverged;
  if (name == "TailBreach") return StepStatus::TailBreach;
  throw std::invalid_argument("unknown status '" + name + "'");
}

void SolverConfig::validate() const {
  const auto require = [](bool cond, const char* key, const char* what) {
    if (!cond) throw ConfigError(key, what);
  };
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha", "must be a finite value >= 0");
  require(std::isfinite(dt_min) && dt_min > 0.0, "dt_min", "must be > 0");
  require(dt_min <= dt_max, "dt_min", "must not exceed dt_max");
  require(std::isfinite(dt0) && dt0 >= dt_min, "dt0", "must satisfy dt_min <= dt0");
  require(std::isfinite(dt_max) && dt_max >= dt0, "dt_max", "must satisfy dt0 <= dt_max");
  require(std::isfinite(t_end) && t_end >= 0.0, "t_end", "must be >= 0");
  require(picard_max >= 1, "picard_max", "must be >= 1");
  require(std::isfinite(picard_tol) && picard_tol > 0.0, "picard_tol", "must be > 0");
  require(blowup_threshold > 1.0, "blowup_threshold", "must be > 1");
  require(snapshot_stride >= 1, "snapshot_stride", "must be >= 1");
  require(std::isfinite(delta) && delta > 0.0, "delta", "must be > 0");
  require(r0 > 0.0 && r0 < 1.0, "r0", "must lie in (0, 1)");
  require(mono_tol >= 0.0, "mono_tol", "must be >= 0");
  require(tail_tol >= 0.0, "tail_tol", "must be >= 0");
  require(tail_fraction > 0.0 && tail_fraction < 1.0, "tail_fraction", "must lie in (0, 1)");
  require(floor_eps >= 0.0, "floor_eps", "must be >= 0");
  require(grow_after >= 1, "grow_after", "must be >= 1");
  for (double q : tracked_q) require(std::isfinite(q) && q >= 1.0, "tracked_q", "entries must be >= 1");
}

RadialField solve_frozen(const Potential& phi, const RadialField& rhs, double dt) {
  const auto& grid = rhs.grid();
  require_same_grid(grid, *phi.grid);
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);

  // Row i: lower[i]·w[i-1] + diag[i]·w[i] + upper[i]·w[i+1] = rhs[i].
  std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), d(rhs.values().begin(), rhs.values().end());
  {
    const double k = dt * phi.phi[0];
    diag[0] = 1.0 + 6.0 * k * inv_h2;
    upper[0] = -6.0 * k * inv_h2;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double k = dt * phi.phi[i];
    const double drift = 1.0 / (grid.r(i) * h);
    lower[i] = -k * (inv_h2 - drift);
    diag[i] = 1.0 + 2.0 * k * inv_h2;
    upper[i] = -k * (inv_h2 + drift);
  }
  if (grid.kind() == DomainKind::Ball) {
    diag[n - 1] = 1.0;
    d[n - 1] = 0.0;
  } else {
    const double k = dt * phi.phi[n - 1];
    lower[n - 1] = -2.0 * k * inv_h2;
    diag[n - 1] = 1.0 + 2.0 * k * inv_h2;
  }

  // Thomas algorithm. For φ ≥ 0 the matrix is a diagonally dominant M-matrix, so every
  // quantity below keeps its sign and no pivoting is needed.
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = diag[i] - (i > 0 ? lower[i] * c[i - 1] : 0.0);
    if (!std::isfinite(denom) || std::abs(denom) < 1e-300) {
      std::ostringstream msg;
      msg << "singular tridiagonal system: pivot " << denom << " at row " << i;
      throw SingularSystem(msg.str());
    }
    c[i] = upper[i] / denom;
    d[i] = (d[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0)) / denom;
  }
  RadialField w(rhs.grid_ptr());
  w[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) w[i] = d[i] - c[i] * w[i + 1];
  return w;
}

namespace {

RadialField frozen_source(const RadialField& u, const RadialField& at, double dt, double alpha) {
  RadialField rhs = u;
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * alpha * at[i] * at[i];
  return rhs;
}

double l2_distance(const RadialField& a, const RadialField& b) {
  const auto& grid = a.grid();
  long double sum = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double diff = static_cast<long double>(a[i]) - b[i];
    sum += grid.w(i) * diff * diff;
  }
  return std::sqrt(static_cast<double>(sum));
}

}  // namespace

RadialField step_frozen(const RadialField& u, const Potential& phi, double dt, double alpha) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_frozen: dt must be > 0");
  return solve_frozen(phi, frozen_source(u, u, dt, alpha), dt);
}

PicardResult step_picard(const RadialField& u, const SolverConfig& cfg, double dt) {
  PicardResult out;
  out.w = step_frozen(u, inverse_laplacian(u), dt, cfg.alpha);
  out.iters = 1;
  if (cfg.picard_max == 1 || (out.w.max() == 0.0 && out.w.min() == 0.0)) {
    // No iteration requested, or the zero fixed point.
    out.converged = true;
    return out;
  }
  double prev_update = 0.0;
  while (out.iters < cfg.picard_max) {
    RadialField next = solve_frozen(inverse_laplacian(out.w), frozen_source(u, out.w, dt, cfg.alpha), dt);
    ++out.iters;
    const double update = l2_distance(next, out.w);
    out.ratio = prev_update > 0.0 ? update / prev_update : 0.0;
    prev_update = update;
    out.w = std::move(next);
    if (!std::isfinite(update)) break;
    if (update <= cfg.picard_tol * lq_norm(out.w, 2.0)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

RadialField positivity_floor(const RadialField& u, double eps_rel) {
  RadialField out = u;
  const double eps = eps_rel * std::max(u.max(), 0.0);
  for (auto& v : out.values()) {
    if (v < 0.0 && v > -eps) v = 0.0;
  }
  return out;
}

namespace {

std::vector<double> tracked_norms(const RadialField& u, const SolverConfig& cfg) {
  std::vector<double> out;
  out.reserve(cfg.tracked_q.size());
  for (double q : cfg.tracked_q) out.push_back(lq_norm(u, q));
  return out;
}

struct BoundsSample {
  bool ok = true;
  double d1 = 0.0;
  double d2 = 0.0;
};

BoundsSample sample_bounds(const RadialField& u, const SolverConfig& cfg) {
  const Potential phi = inverse_laplacian(u);
  BoundsSample out;
  out.d1 = phi.max();
  if (u.grid().kind() == DomainKind::Ball) {
    // The ⟨x⟩⁻¹ envelope is a whole-space statement; on the ball only φ ≥ 0 is checked.
    out.ok = std::all_of(phi.phi.begin(), phi.phi.end(), [](double v) { return v >= 0.0; });
    out.d2 = 0.0;
    return out;
  }
  const double a0 = annulus_mass(u, cfg.r0);
  if (a0 > 0.0) {
    const PotentialBounds b = potential_bounds_check(phi, cfg.r0, a0);
    out.ok = b.ok;
    out.d2 = b.d2_est;
  } else {
    out.ok = u.max() == 0.0 && u.min() == 0.0;
  }
  return out;
}

Trajectory integrate_from(SolverState state, const InitialStats& s0, const SolverConfig& cfg,
                          const StepObserver& observer, const SnapshotObserver& on_snapshot) {
  Trajectory traj;
  traj.config = cfg;
  traj.u0_stats = s0;
  const bool free_space = state.u.grid().kind() == DomainKind::WholeSpaceTruncated;
  const double blowup_level = cfg.blowup_threshold * s0.linf;
  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);

  double prev_square = std::pow(lq_norm(state.u, 2.0), 2);
  traj.status = StepStatus::Ok;
  traj.reason = "reached t_end";

  while (state.t < cfg.t_end - t_eps) {
    const double dt = std::min(state.dt, cfg.t_end - state.t);

    PicardResult step;
    bool accepted = false;
    std::string failure;
    try {
      step = step_picard(state.u, cfg, dt);
      step.w = positivity_floor(step.w, cfg.floor_eps);
      if (!step.w.finite()) {
        failure = "non-finite values";
      } else if (!step.converged) {
        failure = "Picard iteration did not converge";
      } else if (!is_non_negative(step.w)) {
        failure = "positivity violated";
      } else {
        accepted = true;
      }
    } catch (const SingularSystem& e) {
      failure = e.what();
    }

    if (!accepted) {
      if (dt <= cfg.dt_min) {
        traj.status = StepStatus::Diverged;
        std::ostringstream msg;
        msg << "dt_min reached without progress at t=" << state.t << " (" << failure << ")";
        traj.reason = msg.str();
        break;
      }
      state.dt = std::max(0.5 * dt, cfg.dt_min);
      state.clean_steps = 0;
      continue;
    }

    state.u = std::move(step.w);
    state.t += dt;
    ++state.step;

    StepReport rep;
    rep.t = state.t;
    rep.dt = dt;
    rep.l1 = lq_norm(state.u, 1.0);
    rep.l2 = lq_norm(state.u, 2.0);
    rep.l2pd = lq_norm(state.u, 2.0 + cfg.delta);
    rep.linf = state.u.max();
    const double square = rep.l2 * rep.l2;
    state.square_integral += 0.5 * dt * (prev_square + square);
    prev_square = square;
    rep.mass_balance_residual =
        s0.l1 == 0.0 ? 0.0
                     : std::abs(rep.l1 + (1.0 - cfg.alpha) * state.square_integral - s0.l1) / s0.l1;
    rep.picard_iters = step.iters;
    rep.picard_ratio = step.ratio;
    rep.picard_converged = step.converged;
    rep.monotone_ok = is_non_increasing(state.u, cfg.mono_tol);
    rep.positive_ok = is_non_negative(state.u);
    const BoundsSample bounds = sample_bounds(state.u, cfg);
    rep.potential_bounds_ok = bounds.ok;
    rep.d1_est = bounds.d1;
    rep.d2_est = bounds.d2;
    rep.tail_ok = !free_space || tail_guard(state.u, cfg.tail_fraction, cfg.tail_tol);
    rep.weighted_h2 = weighted_h2(state.u);
    rep.tracked = tracked_norms(state.u, cfg);

    if (s0.linf > 0.0 && rep.linf > blowup_level) {
      rep.status = StepStatus::Diverged;
      std::ostringstream msg;
      msg << "max u exceeded " << cfg.blowup_threshold << " x initial at t=" << state.t;
      traj.reason = msg.str();
    } else if (!rep.tail_ok) {
      rep.status = StepStatus::TailBreach;
      std::ostringstream msg;
      msg << "tail guard tripped at t=" << state.t;
      traj.reason = msg.str();
    }
    traj.status = rep.status;

    if (++state.clean_steps >= cfg.grow_after) {
      state.dt = std::min(2.0 * state.dt, cfg.dt_max);
      state.clean_steps = 0;
    }

    traj.reports.push_back(rep);
    if (observer) observer(rep);
    const bool last = rep.status != StepStatus::Ok || state.t >= cfg.t_end - t_eps;
    if (state.step % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || last) {
      traj.snapshots.push_back(state);
      if (on_snapshot) on_snapshot(state);
    }
    if (rep.status != StepStatus::Ok) break;
  }
  if (traj.status == StepStatus::Ok) traj.reason = "reached t_end";
  return traj;
}

}  // namespace

InitialStats initial_stats(const RadialField& u0, const SolverConfig& cfg) {
  InitialStats s;
  s.l1 = lq_norm(u0, 1.0);
  s.l2 = lq_norm(u0, 2.0);
  s.l2pd = lq_norm(u0, 2.0 + cfg.delta);
  s.linf = u0.max();
  s.weighted_h2 = weighted_h2(u0);
  s.d2_est = sample_bounds(u0, cfg).d2;
  s.tracked = tracked_norms(u0, cfg);
  return s;
}

Trajectory run(const RadialField& u0, const SolverConfig& cfg, const StepObserver& observer,
               const SnapshotObserver& on_snapshot) {
  cfg.validate();
  if (!u0.finite()) throw std::invalid_argument("run: initial datum has non-finite values");
  std::vector<std::string> warnings;
  if (!is_non_negative(u0)) warnings.emplace_back("initial datum has negative values");
  if (!is_non_increasing(u0, 0.0)) warnings.emplace_back("initial datum is not radially non-increasing");

  SolverState state;
  state.u = u0;
  state.dt = cfg.dt0;
  Trajectory traj = integrate_from(std::move(state), initial_stats(u0, cfg), cfg, observer, on_snapshot);
  traj.warnings = std::move(warnings);
  return traj;
}

Trajectory resume(const SolverState& from, const InitialStats& u0_stats, const SolverConfig& cfg,
                  const StepObserver& observer, const SnapshotObserver& on_snapshot) {
  cfg.validate();
  return integrate_from(from, u0_stats, cfg, observer, on_snapshot);
}

}  // namespace nldiff
