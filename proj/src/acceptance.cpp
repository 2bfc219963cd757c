#include "nldiff/acceptance.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "nldiff/diagnostics.hpp"
#include "nldiff/io.hpp"
#include "nldiff/operators.hpp"
#include "nldiff/scenarios.hpp"
#include "nldiff/stepper.hpp"

namespace nldiff {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CriterionResult named(int id, std::string name) {
  CriterionResult res;
  res.id = id;
  res.name = std::move(name);
  return res;
}

std::string sci(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", digits, v);
  return buf;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

RadialField indicator(const GridPtr& grid) {
  RadialField u(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double r = grid->r(i);
    u[i] = r < 1.0 ? 1.0 : (r == 1.0 ? 0.5 : 0.0);
  }
  return u;
}

RadialField gaussian(const GridPtr& grid) {
  RadialField u(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) u[i] = std::exp(-grid->r(i) * grid->r(i));
  return u;
}

std::size_t node_at(const RadialGrid& grid, double r) {
  return static_cast<std::size_t>(std::lround(r / grid.spacing()));
}

/// Shared runs: run 4 (α = 0.4 Gaussian, fixed dt = 1e-3) and its dt/2 companion.
struct Context {
  std::optional<Trajectory> run4;
  double run4_seconds = 0.0;
  std::optional<Trajectory> run4_half;

  static SolverConfig fixed_dt(double dt) {
    SolverConfig cfg;
    cfg.alpha = 0.4;
    cfg.dt0 = cfg.dt_min = cfg.dt_max = dt;
    cfg.t_end = 1.0;
    cfg.delta = 0.1;
    cfg.r0 = 0.5;
    return cfg;
  }

  const Trajectory& main_run() {
    if (!run4) {
      const auto start = Clock::now();
      const auto init = make_initial({}, make_grid(DomainKind::WholeSpaceTruncated, 1025, 8.0));
      run4 = run(init.field, fixed_dt(1e-3));
      run4_seconds = seconds_since(start);
    }
    return *run4;
  }

  const Trajectory& half_run() {
    if (!run4_half) {
      const auto init = make_initial({}, make_grid(DomainKind::WholeSpaceTruncated, 1025, 8.0));
      run4_half = run(init.field, fixed_dt(5e-4));
    }
    return *run4_half;
  }
};

CriterionResult operator_exactness() {
  CriterionResult res = named(1, "operator exactness (unit-ball indicator)");
  const auto start = Clock::now();
  const double exact[3] = {0.5, 1.0 / 3.0, 1.0 / 6.0};
  const double where[3] = {0.0, 1.0, 2.0};
  double err[2][3];
  int level = 0;
  for (std::size_t n : {2049u, 4097u}) {
    const auto grid = make_grid(DomainKind::WholeSpaceTruncated, n, 4.0);
    const auto p = inverse_laplacian_free(indicator(grid));
    for (int k = 0; k < 3; ++k) err[level][k] = std::abs(p.phi[node_at(*grid, where[k])] - exact[k]);
    ++level;
  }
  res.seconds = seconds_since(start);
  double worst = 0.0, lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k < 3; ++k) {
    worst = std::max(worst, err[1][k]);
    const double order = std::log2(err[0][k] / err[1][k]);
    lo = std::min(lo, order);
    hi = std::max(hi, order);
  }
  res.pass = worst <= 1e-4 && lo >= 1.8 && hi <= 2.2 && res.seconds < 1.0;
  res.measured = "max err " + sci(worst) + " at n=4097; orders [" + fixed(lo) + ", " + fixed(hi) + "]";
  return res;
}

CriterionResult roundtrip() {
  CriterionResult res = named(2, "potential roundtrip");
  const auto start = Clock::now();
  const double coarse = potential_roundtrip_residual(gaussian(make_grid(DomainKind::WholeSpaceTruncated, 1025, 8.0)));
  const double fine = potential_roundtrip_residual(gaussian(make_grid(DomainKind::WholeSpaceTruncated, 2049, 8.0)));
  res.seconds = seconds_since(start);
  const double ratio = fine / coarse;
  res.pass = coarse <= 1e-3 && ratio >= 0.25 / 1.5 && ratio <= 0.25 * 1.5;
  res.measured = "residual " + sci(coarse) + " at n=1025; refinement ratio " + fixed(ratio, 4);
  return res;
}

CriterionResult ball_green() {
  CriterionResult res = named(3, "ball Green's function");
  const auto start = Clock::now();
  const auto grid = make_grid(DomainKind::Ball, 2049);
  const auto p = inverse_laplacian_ball(RadialField(grid, std::vector<double>(grid->size(), 1.0)));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double r = grid->r(i);
    worst = std::max(worst, std::abs(p.phi[i] - (1.0 - r * r) / 6.0));
  }
  res.seconds = seconds_since(start);
  res.pass = worst <= 1e-6;
  res.measured = "max |phi - (1-r^2)/6| = " + sci(worst);
  return res;
}

CriterionResult mass_identity(Context& ctx) {
  CriterionResult res = named(4, "mass identity");
  const auto start = Clock::now();
  const auto& a = ctx.main_run();
  const double run_seconds = ctx.run4_seconds;
  const auto& b = ctx.half_run();
  res.seconds = seconds_since(start);
  const double ra = mass_balance_residual(a, 1.0);
  const double rb = mass_balance_residual(b, 1.0);
  const double ratio = rb / ra;
  const bool reached = a.status == StepStatus::Ok && b.status == StepStatus::Ok &&
                       std::abs(a.final_time() - 1.0) < 1e-9 && std::abs(b.final_time() - 1.0) < 1e-9;
  res.pass = reached && ra <= 1e-3 && ratio >= 0.5 / 1.5 && ratio <= 0.5 * 1.5 && run_seconds < 30.0;
  res.measured = "residual " + sci(ra) + " (dt=1e-3), " + sci(rb) + " (dt=5e-4); ratio " + fixed(ratio, 4) +
                 "; run " + fixed(run_seconds, 2) + "s";
  return res;
}

CriterionResult decay_regime(Context& ctx) {
  CriterionResult res = named(5, "L2 / L^(2+delta) decay, positivity, monotonicity");
  const auto start = Clock::now();
  const auto& traj = ctx.main_run();
  const auto l2 = decay_tracker(traj, 2.0);
  const auto l2pd = decay_tracker(traj, 2.0 + traj.config.delta);
  std::size_t bad_pos = 0, bad_mono = 0;
  for (const auto& rep : traj.reports) {
    bad_pos += !rep.positive_ok;
    bad_mono += !rep.monotone_ok;
  }
  res.seconds = seconds_since(start);
  res.pass = l2.monotone_after_burnin && l2pd.monotone_after_burnin && bad_pos == 0 && bad_mono == 0;
  res.measured = "L2 monotone=" + std::to_string(l2.monotone_after_burnin) +
                 " (ratio " + fixed(l2.terminal_ratio, 4) + "), L2.1 monotone=" +
                 std::to_string(l2pd.monotone_after_burnin) + " (ratio " + fixed(l2pd.terminal_ratio, 4) +
                 "); positivity failures " + std::to_string(bad_pos) + ", monotonicity failures " +
                 std::to_string(bad_mono);
  return res;
}

CriterionResult potential_bounds(Context& ctx) {
  CriterionResult res = named(6, "potential bounds along the run");
  const auto start = Clock::now();
  const auto& traj = ctx.main_run();
  std::size_t bad = 0;
  double min_d2 = INFINITY;
  for (const auto& rep : traj.reports) {
    bad += !rep.potential_bounds_ok;
    min_d2 = std::min(min_d2, rep.d2_est);
  }
  const double d2_0 = traj.u0_stats.d2_est;
  res.seconds = seconds_since(start);
  res.pass = bad == 0 && min_d2 >= 0.5 * d2_0 && !traj.reports.empty();
  res.measured = "bound failures " + std::to_string(bad) + "; min D2 " + fixed(min_d2, 4) + " vs initial " +
                 fixed(d2_0, 4);
  return res;
}

CriterionResult ball_blowup() {
  CriterionResult res = named(7, "ball blow-up");
  const auto start = Clock::now();
  SolverConfig cfg;
  cfg.alpha = 1.5;
  cfg.t_end = 10.0;
  const auto init = make_initial({.family = Family::Parabolic}, make_grid(DomainKind::Ball, 1025));
  const auto traj = run(init.field, cfg);
  res.seconds = seconds_since(start);

  const double volume = 4.0 * std::numbers::pi / 3.0;
  const double m0 = traj.u0_stats.l1;
  const double t_star = comparison_blowup_time(cfg.alpha, m0).value_or(NAN);
  double worst = INFINITY;
  double prev = m0;
  for (const auto& rep : traj.reports) {
    const double slope = (rep.l1 - prev) / rep.dt;
    const double floor = (cfg.alpha - 1.0) * rep.l1 * rep.l1 / volume - 1e-6 * m0 * m0;
    worst = std::min(worst, slope - floor);
    prev = rep.l1;
  }
  const double t_div = traj.final_time();
  res.pass = traj.status == StepStatus::Diverged && t_div < 5.1 && worst >= 0.0 && res.seconds < 60.0;
  res.measured = "status " + to_string(traj.status) + " at t=" + fixed(t_div, 4) + " (t* = " + fixed(t_star, 4) +
                 "); min minorant slack " + sci(worst);
  return res;
}

CriterionResult picard_contraction(Context& ctx) {
  CriterionResult res = named(8, "Picard contraction");
  const auto start = Clock::now();
  const auto& traj = ctx.main_run();
  std::size_t counted = 0, contracting = 0;
  for (std::size_t k = 0; k < std::min<std::size_t>(100, traj.reports.size()); ++k) {
    const auto& rep = traj.reports[k];
    if (rep.dt > 1e-3) continue;
    ++counted;
    contracting += rep.picard_ratio < 0.5;
  }
  res.seconds = seconds_since(start);
  const double share = counted ? static_cast<double>(contracting) / static_cast<double>(counted) : 0.0;
  res.pass = counted > 0 && share >= 0.99;
  res.measured = std::to_string(contracting) + "/" + std::to_string(counted) + " steps with ratio < 1/2";
  return res;
}

CriterionResult m_matrix_positivity() {
  CriterionResult res = named(9, "M-matrix positivity");
  const auto start = Clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(8, 400);
  double worst = INFINITY;
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto kind = trial % 2 ? DomainKind::Ball : DomainKind::WholeSpaceTruncated;
    const auto grid = make_grid(kind, size(rng), kind == DomainKind::Ball ? 1.0 : 1.0 + 15.0 * unit(rng));
    const double u_scale = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    const double phi_scale = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    RadialField u(grid);
    Potential phi;
    phi.grid = grid;
    phi.phi.resize(grid->size());
    phi.dphi_dr.assign(grid->size(), 0.0);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      u[i] = u_scale * (1e-6 + unit(rng));
      phi.phi[i] = phi_scale * (1e-6 + unit(rng));
    }
    const double dt = std::pow(10.0, -5.0 + 4.0 * unit(rng));
    const double alpha = 2.0 * unit(rng);
    const auto w = step_frozen(u, phi, dt, alpha);
    const double margin = w.min() / u.max();
    worst = std::min(worst, margin);
    failures += !(w.min() >= -1e-12 * u.max());
  }
  res.seconds = seconds_since(start);
  res.pass = failures == 0;
  res.measured = "failures " + std::to_string(failures) + "/1000; min(output)/max(input) = " + sci(worst);
  return res;
}

CriterionResult decay23_regime() {
  CriterionResult res = named(10, "alpha = 0.6 regime");
  const auto start = Clock::now();
  SolverConfig cfg;
  cfg.alpha = 0.6;
  cfg.t_end = 2.0;
  cfg.tracked_q = {1.55, 1.4};
  const auto init = make_initial({}, make_grid(DomainKind::WholeSpaceTruncated, 1025, 8.0));
  const auto traj = run(init.field, cfg);
  const auto bounded = lq_series(traj, 1.55);
  double peak = 0.0;
  for (double v : bounded) peak = std::max(peak, v / bounded.front());
  const auto trend = decay_tracker(traj, 1.4);
  res.seconds = seconds_since(start);
  const bool reached = traj.status == StepStatus::Ok && std::abs(traj.final_time() - 2.0) < 1e-9;
  res.pass = reached && peak <= 2.0 && trend.monotone_after_burnin;
  res.measured = "max L1.55 / initial " + fixed(peak, 4) + "; L1.4 monotone=" +
                 std::to_string(trend.monotone_after_burnin) + " (ratio " + fixed(trend.terminal_ratio, 4) + ")";
  return res;
}

int run_child(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

CriterionResult determinism_io(const AcceptanceOptions& options) {
  CriterionResult res = named(11, "determinism and I/O");
  const auto start = Clock::now();
  namespace fs = std::filesystem;
  fs::path dir = options.work_dir;
  if (dir.empty()) dir = fs::temp_directory_path() / ("nldiff-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  // Repeated sweep, CSVs written to two directories and compared byte for byte.
  SweepSpec sweep;
  sweep.alphas = {0.4, 0.8, 1.5};
  bool identical = true;
  for (int pass = 0; pass < 2; ++pass) {
    const auto out = dir / ("sweep" + std::to_string(pass));
    fs::create_directories(out);
    const auto entries = run_regime_sweep(sweep);
    for (const auto& e : entries) {
      emit_timeseries(e.trajectory, out / ("alpha_" + format_double(e.alpha) + ".csv"));
    }
  }
  for (double a : sweep.alphas) {
    const std::string name = "alpha_" + format_double(a) + ".csv";
    identical = identical && read_file(dir / "sweep0" / name) == read_file(dir / "sweep1" / name);
  }

  // Snapshot save/load/resume against the uninterrupted run.
  RunConfig rc;
  rc.solver.alpha = 0.4;
  rc.solver.t_end = 1.0;
  rc.solver.snapshot_stride = 50;
  const auto grid = make_grid(rc.grid.kind, rc.grid.n, rc.grid.radius);
  const auto init = make_initial(rc.data, grid, rc.solver.delta, rc.solver.tail_fraction, rc.solver.tail_tol);
  const auto full = run(init.field, rc.solver);
  double rel = INFINITY;
  if (full.snapshots.size() >= 2) {
    const auto& mid = full.snapshots[full.snapshots.size() / 2];
    const auto path = dir / "snapshot.json";
    emit_snapshot(mid, full.u0_stats, rc, path);
    const auto snap = load_snapshot(path, rc);
    const auto rest = resume(snap.state, snap.u0_stats, rc.solver);
    if (!rest.reports.empty()) {
      const double a = full.reports.back().l2;
      const double b = rest.reports.back().l2;
      rel = std::abs(a - b) / std::abs(a);
    }
  }

  std::string verify_note = "verify exit: not checked (no CLI path)";
  bool verify_ok = true;
  if (!options.cli_path.empty()) {
    const auto out = dir / "verify";
    const int code = run_child(quoted(options.cli_path) + " verify --quiet --out " + quoted(out) + " > " +
                               quoted(dir / "verify.log") + " 2>&1");
    verify_ok = code == 0;
    verify_note = "verify exit " + std::to_string(code);
  }

  if (options.work_dir.empty()) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  res.seconds = seconds_since(start);
  res.pass = identical && rel <= 1e-12 && verify_ok;
  res.measured = std::string("sweep CSVs identical=") + (identical ? "1" : "0") + "; resume L2 rel diff " +
                 sci(rel) + "; " + verify_note;
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  Context ctx;
  std::vector<CriterionResult> results;
  const auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!wanted(id)) continue;
    CriterionResult res;
    try {
      switch (id) {
        case 1: res = operator_exactness(); break;
        case 2: res = roundtrip(); break;
        case 3: res = ball_green(); break;
        case 4: res = mass_identity(ctx); break;
        case 5: res = decay_regime(ctx); break;
        case 6: res = potential_bounds(ctx); break;
        case 7: res = ball_blowup(); break;
        case 8: res = picard_contraction(ctx); break;
        case 9: res = m_matrix_positivity(); break;
        case 10: res = decay23_regime(); break;
        case 11: res = determinism_io(options); break;
      }
    } catch (const std::exception& e) {
      res.id = id;
      res.name = "criterion " + std::to_string(id);
      res.pass = false;
      res.measured = std::string("error: ") + e.what();
    }
    if (options.on_result) options.on_result(res);
    results.push_back(std::move(res));
  }
  return results;
}

std::string format_result_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof(head), "[%s] %2d  ", r.pass ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + "  (" + r.measured + ")  " + fixed(r.seconds, 2) + "s";
}

std::string format_acceptance_table(const std::vector<CriterionResult>& results) {
  std::ostringstream out;
  std::size_t passed = 0;
  for (const auto& r : results) {
    out << format_result_line(r) << '\n';
    passed += r.pass;
  }
  out << passed << "/" << results.size() << " criteria passed\n";
  return out.str();
}

}  // namespace nldiff
