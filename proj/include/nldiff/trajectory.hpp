#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nldiff/radial_grid.hpp"

namespace nldiff {

/// Invalid configuration value; key() names the offending setting.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct SolverConfig {
  double alpha = 0.4;
  double dt0 = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double t_end = 1.0;
  int picard_max = 50;
  double picard_tol = 1e-10;
  double blowup_threshold = 1e6;
  int snapshot_stride = 100;

  // Monitoring.
  double delta = 0.1;      ///< exponent offset of the L^{2+δ} norm
  double r0 = 0.5;         ///< inner radius of the annulus r0 < r < 1/r0
  double mono_tol = 1e-8;  ///< allowed max_i (u[i+1] − u[i]) relative to max u
  double tail_tol = 1e-10;
  double tail_fraction = 0.02;
  double floor_eps = 1e-13;
  int grow_after = 10;       ///< clean steps before dt is doubled
  std::vector<double> tracked_q;  ///< extra L^q norms recorded per step

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

enum class StepStatus { Ok, Diverged, TailBreach };

std::string to_string(StepStatus status);
StepStatus step_status_from_string(const std::string& name);

struct StepReport {
  double t = 0.0;
  double dt = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l2pd = 0.0;
  double linf = 0.0;
  double mass_balance_residual = 0.0;
  int picard_iters = 0;
  double picard_ratio = 0.0;
  bool picard_converged = true;
  bool monotone_ok = true;
  bool positive_ok = true;
  bool potential_bounds_ok = true;
  bool tail_ok = true;
  double weighted_h2 = 0.0;
  double d1_est = 0.0;
  double d2_est = 0.0;
  std::vector<double> tracked;  ///< L^q norms for SolverConfig::tracked_q
  StepStatus status = StepStatus::Ok;
};

/// Norms of the initial datum, the reference for growth and decay ratios.
struct InitialStats {
  double l1 = 0.0;
  double l2 = 0.0;
  double l2pd = 0.0;
  double linf = 0.0;
  double weighted_h2 = 0.0;
  double d2_est = 0.0;
  std::vector<double> tracked;
};

/// Everything needed to continue a run bit-for-bit.
struct SolverState {
  RadialField u;
  double t = 0.0;
  double dt = 0.0;
  std::size_t step = 0;
  int clean_steps = 0;
  double square_integral = 0.0;  ///< trapezoid-in-time ∫₀ᵗ∫u² ds
};

struct Trajectory {
  SolverConfig config;
  InitialStats u0_stats;
  std::vector<StepReport> reports;
  std::vector<SolverState> snapshots;
  StepStatus status = StepStatus::Ok;
  std::string reason;
  std::vector<std::string> warnings;

  double final_time() const { return reports.empty() ? 0.0 : reports.back().t; }
};

}  // namespace nldiff
