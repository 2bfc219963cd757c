#include "nldiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nldiff {

double mass_balance_residual(const Trajectory& traj, double upto) {
  if (traj.reports.empty()) throw std::invalid_argument("mass_balance_residual: empty trajectory");
  const double m0 = traj.u0_stats.l1;
  if (m0 == 0.0) return 0.0;
  const double alpha = traj.config.alpha;

  long double q = 0.0L;
  double prev_sq = traj.u0_stats.l2 * traj.u0_stats.l2;
  double mass = m0;
  const double slack = 1e-12 * std::max(1.0, std::abs(upto));
  for (const auto& rep : traj.reports) {
    if (rep.t > upto + slack) break;
    const double sq = rep.l2 * rep.l2;
    q += 0.5L * rep.dt * (prev_sq + sq);
    prev_sq = sq;
    mass = rep.l1;
  }
  return static_cast<double>(std::abs(mass + (1.0L - alpha) * q - m0) / m0);
}

double annulus_mass(const RadialField& u, double r0) {
  return 4.0 * std::numbers::pi * interpolant_moment(u, r0, 1.0 / r0, 2);
}

PotentialBounds potential_bounds_check(const Potential& phi, double r0, double A0) {
  if (!(A0 > 0.0)) {
    throw std::invalid_argument("potential_bounds_check: A0 <= 0 (no mass in r0 < r < 1/r0)");
  }
  if (!(r0 > 0.0 && r0 < 1.0)) throw std::invalid_argument("potential_bounds_check: need 0 < r0 < 1");
  const auto r = phi.grid->nodes();
  PotentialBounds out;
  out.d1_est = phi.max();
  out.d2_est = phi.phi[0];
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.d2_est = std::min(out.d2_est, phi.phi[i] * japanese_bracket(r[i]));
  }
  out.minorant = A0 * r0 / (8.0 * std::numbers::pi);
  out.ok = out.d2_est >= out.minorant;
  return out;
}

PotentialBounds potential_bounds_check(const RadialField& u, double r0, double A0) {
  return potential_bounds_check(inverse_laplacian(u), r0, A0);
}

MonotoneBound pointwise_monotone_bound(const RadialField& u, double r0) {
  if (!(r0 > 0.0) || r0 > u.grid().radius()) {
    throw std::invalid_argument("pointwise_monotone_bound: need 0 < r0 <= R");
  }
  MonotoneBound out;
  out.input_monotone = is_non_increasing(u, 0.0) && is_non_negative(u);
  const double d3 = interpolant_moment(u, 0.0, r0, 2);
  out.excess = interpolate(u, r0) - 3.0 * d3 / (r0 * r0 * r0);
  return out;
}

double weighted_h2(const RadialField& u) {
  const RadialField lap = laplacian_radial(u);
  const auto& grid = u.grid();
  long double sum = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sum += static_cast<long double>(grid.w(i)) * japanese_bracket(grid.r(i)) * lap[i] * lap[i];
  }
  return std::sqrt(static_cast<double>(sum));
}

bool tail_guard(const RadialField& u, double tail_fraction, double tol) {
  const std::size_t n = u.size();
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  const double limit = tol * u.max();
  for (std::size_t i = n - count; i < n; ++i) {
    if (u[i] > limit) return false;
  }
  return true;
}

bool is_non_increasing(const RadialField& u, double tol) {
  const double limit = tol * std::max(u.max(), 0.0);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    if (u[i + 1] - u[i] > limit) return false;
  }
  return true;
}

bool is_non_negative(const RadialField& u) { return u.min() >= 0.0; }

std::vector<double> lq_series(const Trajectory& traj, double q) {
  const auto& cfg = traj.config;
  const auto pick = [&](const InitialStats& s0, const StepReport* rep) -> double {
    if (q == 1.0) return rep ? rep->l1 : s0.l1;
    if (q == 2.0) return rep ? rep->l2 : s0.l2;
    if (q == 2.0 + cfg.delta) return rep ? rep->l2pd : s0.l2pd;
    for (std::size_t k = 0; k < cfg.tracked_q.size(); ++k) {
      if (cfg.tracked_q[k] == q) return rep ? rep->tracked.at(k) : s0.tracked.at(k);
    }
    throw std::invalid_argument("lq_series: q = " + std::to_string(q) + " was not recorded");
  };
  std::vector<double> series;
  series.reserve(traj.reports.size() + 1);
  series.push_back(pick(traj.u0_stats, nullptr));
  for (const auto& rep : traj.reports) series.push_back(pick(traj.u0_stats, &rep));
  return series;
}

DecayTrend decay_tracker(const Trajectory& traj, double q, double tol) {
  DecayTrend out;
  const double alpha = traj.config.alpha;
  if (alpha < 0.5) {
    out.in_regime = q > 1.0 && q <= 2.0;
  } else if (alpha < 2.0 / 3.0) {
    out.in_regime = q > 1.0 && q <= 1.5;
  } else {
    out.in_regime = false;
  }

  const std::vector<double> series = lq_series(traj, q);
  const std::size_t steps = series.size() - 1;
  const auto burnin = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(steps)));
  for (std::size_t k = burnin; k + 1 < series.size(); ++k) {
    if (series[k + 1] > series[k] * (1.0 + tol)) {
      out.monotone_after_burnin = false;
      break;
    }
  }
  out.terminal_ratio = series.front() == 0.0 ? 0.0 : series.back() / series.front();
  return out;
}

std::optional<double> comparison_blowup_time(double alpha, double M0) {
  if (!(alpha > 1.0) || !(M0 > 0.0)) return std::nullopt;
  const double ball_volume = 4.0 * std::numbers::pi / 3.0;
  return ball_volume / ((alpha - 1.0) * M0);
}

}  // namespace nldiff
