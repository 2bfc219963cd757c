#pragma once

#include <string>
#include <vector>

#include "nldiff/radial_grid.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

enum class Family {
  Gaussian,   ///< e^{−(r/width)²}
  Bump,       ///< height on [0, plateau], C² quintic fall-off to 0 at cutoff
  PowerTail,  ///< core·⟨r⟩^{−power}, power > 3
  Parabolic,  ///< (1 − (r/support)²)₊, the ball blow-up datum
};

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct InitialDataSpec {
  Family family = Family::Gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double height = 1.0;
  double plateau = 0.5;
  double cutoff = 2.0;
  double power = 4.0;
  double core = 1.0;
  double support = 1.0;

  bool operator==(const InitialDataSpec&) const = default;
};

struct InitialData {
  RadialField field;
  double mass = 0.0;
  double l2pd = 0.0;
  double weighted_h2 = 0.0;  ///< ‖⟨x⟩^{1/2}Δu₀‖_{L²}
};

/// Samples a positive, radial, non-increasing datum. Throws std::invalid_argument for
/// parameters outside the family's range, a bump cutoff beyond R, PowerTail on the ball,
/// or data that fail the tail guard on a whole-space grid.
InitialData make_initial(const InitialDataSpec& spec, const GridPtr& grid, double delta = 0.1,
                         double tail_fraction = 0.02, double tail_tol = 1e-10);

enum class Regime { Decay12, Decay23, OpenRegime, BallBlowup };
enum class Verdict { Pass, Fail, Observational };

std::string to_string(Regime regime);
std::string to_string(Verdict verdict);
Regime regime_for(double alpha);

struct SweepSpec {
  std::vector<double> alphas;
  InitialDataSpec data;  ///< whole-space datum used for α ≤ 1
  std::size_t n = 1025;
  double radius = 8.0;
  InitialDataSpec ball_data{.family = Family::Parabolic};  ///< datum used for α > 1
  std::size_t ball_n = 1025;
  SolverConfig base;     ///< time stepping; alpha is overwritten per entry
  double gamma = 0.05;   ///< L^{3/2+γ} boundedness check for 1/2 ≤ α < 2/3
  double decay_q = 2.0;
  double blowup_margin = 1.02;  ///< BallBlowup passes if t_div < margin·t*
  bool parallel = true;
};

struct SweepEntry {
  double alpha = 0.0;
  Regime regime = Regime::OpenRegime;
  Trajectory trajectory;
  Verdict verdict = Verdict::Observational;
  std::string detail;
};

/// Runs each α in its regime's scenario (whole space for α ≤ 1, unit ball for α > 1) and
/// attaches the regime verdict. Results keep the order of spec.alphas.
std::vector<SweepEntry> run_regime_sweep(const SweepSpec& spec);

enum class RefinementAxis { Joint, Space, Time };

std::string to_string(RefinementAxis axis);

struct ConvergenceSpec {
  InitialDataSpec data;
  double alpha = 0.0;
  double t_probe = 0.5;
  int levels = 4;
  RefinementAxis axis = RefinementAxis::Joint;
  DomainKind domain = DomainKind::WholeSpaceTruncated;
  std::size_t n0 = 65;
  double radius = 8.0;
  double dt0 = 0.05;
  int picard_max = 50;
  double picard_tol = 1e-12;
};

struct ConvergenceRow {
  double h = 0.0;
  double dt = 0.0;
  double error = 0.0;  ///< ‖u_l(t_probe) − u_finest(t_probe)‖_{L²} on level l's nodes
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// log₂ of successive-difference ratios ‖u_l − u_{l+1}‖ / ‖u_{l+1} − u_{l+2}‖;
  /// NaN where both differences vanish.
  std::vector<double> orders;
};

/// Refines h, dt or both by halving for `levels` levels. Throws for levels < 3.
/// data.amplitude = 0 runs the zero datum.
ConvergenceTable convergence_study(const ConvergenceSpec& spec);

}  // namespace nldiff
