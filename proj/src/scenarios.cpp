#include "nldiff/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "nldiff/diagnostics.hpp"
#include "nldiff/stepper.hpp"

namespace nldiff {

std::string to_string(Family family) {
  switch (family) {
    case Family::Gaussian: return "gaussian";
    case Family::Bump: return "bump";
    case Family::PowerTail: return "power_tail";
    case Family::Parabolic: return "parabolic";
  }
  return "gaussian";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "bump") return Family::Bump;
  if (name == "power_tail" || name == "powertail") return Family::PowerTail;
  if (name == "parabolic") return Family::Parabolic;
  throw std::invalid_argument("unknown initial-data family '" + name + "'");
}

namespace {

double shape(const InitialDataSpec& s, double r) {
  switch (s.family) {
    case Family::Gaussian: {
      const double x = r / s.width;
      return std::exp(-x * x);
    }
    case Family::Bump: {
      if (r <= s.plateau) return s.height;
      if (r >= s.cutoff) return 0.0;
      const double x = (r - s.plateau) / (s.cutoff - s.plateau);
      // 1 − (10x³ − 15x⁴ + 6x⁵): C², monotone, flat at both ends.
      const double step = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
      return s.height * (1.0 - step);
    }
    case Family::PowerTail: return s.core * std::pow(1.0 + r * r, -0.5 * s.power);
    case Family::Parabolic: {
      const double x = r / s.support;
      return x >= 1.0 ? 0.0 : 1.0 - x * x;
    }
  }
  return 0.0;
}

void check_spec(const InitialDataSpec& s, const RadialGrid& grid) {
  if (!(s.amplitude > 0.0)) throw std::invalid_argument("amplitude must be > 0");
  switch (s.family) {
    case Family::Gaussian:
      if (!(s.width > 0.0)) throw std::invalid_argument("gaussian width must be > 0");
      break;
    case Family::Bump:
      if (!(s.height > 0.0)) throw std::invalid_argument("bump height must be > 0");
      if (!(s.plateau >= 0.0 && s.cutoff > s.plateau)) {
        throw std::invalid_argument("bump needs 0 <= plateau < cutoff");
      }
      if (s.cutoff > grid.radius()) throw std::invalid_argument("bump cutoff r2 exceeds R");
      break;
    case Family::PowerTail:
      if (!(s.power > 3.0)) throw std::invalid_argument("power_tail needs p > 3 (L1 diverges otherwise)");
      if (!(s.core > 0.0)) throw std::invalid_argument("power_tail core height must be > 0");
      if (grid.kind() == DomainKind::Ball) throw std::invalid_argument("power_tail is whole-space only");
      break;
    case Family::Parabolic:
      if (!(s.support > 0.0)) throw std::invalid_argument("parabolic support must be > 0");
      break;
  }
}

}  // namespace

InitialData make_initial(const InitialDataSpec& spec, const GridPtr& grid, double delta,
                         double tail_fraction, double tail_tol) {
  check_spec(spec, *grid);
  RadialField u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = spec.amplitude * shape(spec, grid->r(i));
  // Clamp so positivity and monotonicity hold exactly, not just up to rounding.
  u[0] = std::max(u[0], 0.0);
  for (std::size_t i = 1; i < u.size(); ++i) u[i] = std::clamp(u[i], 0.0, u[i - 1]);
  if (grid->kind() == DomainKind::Ball) u[u.size() - 1] = 0.0;

  if (grid->kind() == DomainKind::WholeSpaceTruncated && !tail_guard(u, tail_fraction, tail_tol)) {
    throw std::invalid_argument("initial datum breaches the tail guard on R = " +
                                std::to_string(grid->radius()));
  }
  InitialData out;
  out.mass = integrate(u);
  out.l2pd = lq_norm(u, 2.0 + delta);
  out.weighted_h2 = weighted_h2(u);
  out.field = std::move(u);
  return out;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Decay12: return "Decay12";
    case Regime::Decay23: return "Decay23";
    case Regime::OpenRegime: return "OpenRegime";
    case Regime::BallBlowup: return "BallBlowup";
  }
  return "OpenRegime";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Observational: return "observational";
  }
  return "observational";
}

Regime regime_for(double alpha) {
  if (alpha < 0.5) return Regime::Decay12;
  if (alpha < 2.0 / 3.0) return Regime::Decay23;
  if (alpha <= 1.0) return Regime::OpenRegime;
  return Regime::BallBlowup;
}

namespace {

SweepEntry run_entry(const SweepSpec& spec, double alpha) {
  SweepEntry entry;
  entry.alpha = alpha;
  entry.regime = regime_for(alpha);

  SolverConfig cfg = spec.base;
  cfg.alpha = alpha;
  const double bounded_q = 1.5 + spec.gamma;
  if (entry.regime == Regime::Decay23 &&
      std::find(cfg.tracked_q.begin(), cfg.tracked_q.end(), bounded_q) == cfg.tracked_q.end()) {
    cfg.tracked_q.push_back(bounded_q);
  }

  std::ostringstream detail;
  if (entry.regime == Regime::BallBlowup) {
    const InitialData init = make_initial(spec.ball_data, make_grid(DomainKind::Ball, spec.ball_n),
                                          cfg.delta);
    const double t_star = *comparison_blowup_time(alpha, init.mass);
    cfg.t_end = std::max(cfg.t_end, t_star + 1.0);
    entry.trajectory = run(init.field, cfg);
    const auto& traj = entry.trajectory;
    const double t_div = traj.final_time();
    const bool pass = traj.status == StepStatus::Diverged && t_div < spec.blowup_margin * t_star;
    entry.verdict = pass ? Verdict::Pass : Verdict::Fail;
    detail << "t_div=" << t_div << " t*=" << t_star << " status=" << to_string(traj.status);
    entry.detail = detail.str();
    return entry;
  }

  const InitialData init = make_initial(
      spec.data, make_grid(DomainKind::WholeSpaceTruncated, spec.n, spec.radius), cfg.delta,
      cfg.tail_fraction, cfg.tail_tol);
  entry.trajectory = run(init.field, cfg);
  const auto& traj = entry.trajectory;
  const bool ok = traj.status == StepStatus::Ok;
  switch (entry.regime) {
    case Regime::Decay12: {
      const DecayTrend trend = decay_tracker(traj, spec.decay_q);
      entry.verdict = ok && trend.monotone_after_burnin ? Verdict::Pass : Verdict::Fail;
      detail << "L" << spec.decay_q << " monotone=" << trend.monotone_after_burnin
             << " terminal_ratio=" << trend.terminal_ratio;
      break;
    }
    case Regime::Decay23: {
      const std::vector<double> series = lq_series(traj, bounded_q);
      const double peak = *std::max_element(series.begin(), series.end());
      const double bound_ratio = series.front() > 0.0 ? peak / series.front() : 0.0;
      entry.verdict = ok && bound_ratio <= 2.0 ? Verdict::Pass : Verdict::Fail;
      detail << "max L" << bounded_q << " / initial=" << bound_ratio;
      break;
    }
    default: {
      entry.verdict = Verdict::Observational;
      const DecayTrend trend = decay_tracker(traj, 2.0);
      detail << "observational: status=" << to_string(traj.status)
             << " L2 terminal_ratio=" << trend.terminal_ratio
             << " mass=" << (traj.reports.empty() ? traj.u0_stats.l1 : traj.reports.back().l1);
      break;
    }
  }
  if (!ok) detail << " status=" << to_string(traj.status) << " (" << traj.reason << ")";
  entry.detail = detail.str();
  return entry;
}

}  // namespace

std::vector<SweepEntry> run_regime_sweep(const SweepSpec& spec) {
  if (spec.alphas.empty()) throw ConfigError("alphas", "must be non-empty");
  for (double a : spec.alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("alphas", "entries must be >= 0");
  }
  spec.base.validate();

  std::vector<SweepEntry> out;
  out.reserve(spec.alphas.size());
  if (!spec.parallel || spec.alphas.size() == 1) {
    for (double a : spec.alphas) out.push_back(run_entry(spec, a));
    return out;
  }
  std::vector<std::future<SweepEntry>> jobs;
  for (double a : spec.alphas) jobs.push_back(std::async(std::launch::async, run_entry, std::cref(spec), a));
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

std::string to_string(RefinementAxis axis) {
  switch (axis) {
    case RefinementAxis::Joint: return "joint";
    case RefinementAxis::Space: return "space";
    case RefinementAxis::Time: return "time";
  }
  return "joint";
}

namespace {

RadialField solve_level(const ConvergenceSpec& spec, std::size_t n, double dt) {
  const double radius = spec.domain == DomainKind::Ball ? 1.0 : spec.radius;
  const GridPtr grid = make_grid(spec.domain, n, radius);
  // amplitude 0 is accepted here as the zero datum.
  const RadialField u0 = spec.data.amplitude == 0.0 ? RadialField(grid) : make_initial(spec.data, grid).field;
  SolverConfig cfg;
  cfg.alpha = spec.alpha;
  cfg.dt0 = cfg.dt_min = cfg.dt_max = dt;
  cfg.t_end = spec.t_probe;
  cfg.picard_max = spec.picard_max;
  cfg.picard_tol = spec.picard_tol;
  cfg.snapshot_stride = std::numeric_limits<int>::max();
  const Trajectory traj = run(u0, cfg);
  if (traj.status != StepStatus::Ok || traj.snapshots.empty()) {
    throw std::runtime_error("convergence_study: level run failed: " + traj.reason);
  }
  return traj.snapshots.back().u;
}

/// L² distance between a coarse field and a nested finer field sampled at the coarse nodes.
double nested_distance(const RadialField& coarse, const RadialField& fine) {
  const std::size_t stride = (fine.size() - 1) / (coarse.size() - 1);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const long double d = static_cast<long double>(coarse[i]) - fine[i * stride];
    sum += coarse.grid().w(i) * d * d;
  }
  return std::sqrt(static_cast<double>(sum));
}

}  // namespace

ConvergenceTable convergence_study(const ConvergenceSpec& spec) {
  if (spec.levels < 3) throw std::invalid_argument("convergence_study: insufficient levels (need >= 3)");
  if (!(spec.t_probe > 0.0)) throw std::invalid_argument("convergence_study: t_probe must be > 0");

  std::vector<RadialField> solutions;
  ConvergenceTable table;
  for (int l = 0; l < spec.levels; ++l) {
    const bool refine_space = spec.axis != RefinementAxis::Time;
    const bool refine_time = spec.axis != RefinementAxis::Space;
    const std::size_t n = refine_space ? (spec.n0 - 1) * (std::size_t{1} << l) + 1 : spec.n0;
    const double dt = refine_time ? spec.dt0 / static_cast<double>(1 << l) : spec.dt0;
    solutions.push_back(solve_level(spec, n, dt));
    table.rows.push_back({solutions.back().grid().spacing(), dt, 0.0});
  }
  const RadialField& finest = solutions.back();
  for (int l = 0; l < spec.levels; ++l) table.rows[l].error = nested_distance(solutions[l], finest);
  for (int l = 0; l + 2 < spec.levels; ++l) {
    const double a = nested_distance(solutions[l], solutions[l + 1]);
    const double b = nested_distance(solutions[l + 1], solutions[l + 2]);
    table.orders.push_back(a == 0.0 && b == 0.0 ? std::nan("") : std::log2(a / b));
  }
  return table;
}

}  // namespace nldiff
