#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nldiff/acceptance.hpp"
#include "nldiff/diagnostics.hpp"
#include "nldiff/io.hpp"
#include "nldiff/scenarios.hpp"
#include "nldiff/stepper.hpp"

namespace fs = std::filesystem;
using namespace nldiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

/// Config-class failure: bad document, bad flag value, snapshot that does not match.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Abandoned {};

struct Globals {
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
};

RunConfig load(const Globals& g) {
  if (g.config_path.empty()) return parse_config("");
  return load_config(g.config_path);
}

fs::path output_dir(const Globals& g) {
  if (!g.out_dir.empty()) return g.out_dir;
  if (const char* env = std::getenv("NLDIFF_OUT_DIR"); env && *env) return env;
  return "nldiff-out";
}

InitialData initial_for(const RunConfig& cfg) {
  try {
    const auto grid = make_grid(cfg.grid.kind, cfg.grid.n, cfg.grid.radius);
    return make_initial(cfg.data, grid, cfg.solver.delta, cfg.solver.tail_fraction, cfg.solver.tail_tol);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("initial data: ") + e.what());
  }
}

/// Keeps the header and the first `rows` data lines of a time-series file.
void truncate_timeseries(const fs::path& path, std::size_t rows) {
  std::istringstream in(read_file(path));
  std::string kept, line;
  std::size_t lines = 0;
  while (lines < rows + 1 && std::getline(in, line)) {
    kept += line + "\n";
    ++lines;
  }
  if (lines != rows + 1) {
    throw std::runtime_error(path.string() + " has " + std::to_string(lines == 0 ? 0 : lines - 1) +
                             " rows, snapshot expects at least " + std::to_string(rows));
  }
  write_file(path, kept);
}

int cmd_run(const Globals& g, bool resume_requested, std::size_t stop_after) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(g);
  const fs::path out = output_dir(g);
  fs::create_directories(out);
  const fs::path csv = out / "timeseries.csv";
  const fs::path snap_path = out / "snapshot.json";
  const fs::path manifest_path = out / "manifest.json";

  std::optional<Snapshot> snap;
  if (resume_requested) {
    if (!fs::exists(snap_path)) throw UsageError("--resume: no snapshot at " + snap_path.string());
    try {
      snap = load_snapshot(snap_path, cfg);
    } catch (const SnapshotError& e) {
      throw UsageError(std::string("--resume: ") + e.what());
    }
    bool finished = snap->state.t >= cfg.solver.t_end * (1.0 - 1e-12);
    if (fs::exists(manifest_path)) {
      const auto previous = parse_manifest(read_file(manifest_path));
      finished = finished || previous.terminal_status != StepStatus::Ok;
    }
    if (finished) {
      std::cout << "run in " << out.string() << " already complete at t=" << snap->state.t
                << "; nothing to resume\n";
      return kExitOk;
    }
    truncate_timeseries(csv, snap->state.step);
  } else {
    write_file(csv, timeseries_header());
  }

  std::ofstream rows(csv, std::ios::binary | std::ios::app);
  if (!rows) throw std::runtime_error("cannot open " + csv.string());
  std::size_t taken = 0;
  const auto on_report = [&](const StepReport& rep) {
    rows << timeseries_row(rep);
    rows.flush();
    if (stop_after > 0 && ++taken >= stop_after) throw Abandoned{};
  };

  Trajectory traj;
  InitialStats stats;
  const auto on_snapshot = [&](const SolverState& state) {
    emit_snapshot(state, stats, cfg, snap_path);
    if (!g.quiet) {
      std::cerr << "step " << state.step << "  t=" << state.t << "  dt=" << state.dt
                << "  max u=" << state.u.max() << '\n';
    }
  };
  try {
    if (snap) {
      stats = snap->u0_stats;
      traj = resume(snap->state, stats, cfg.solver, on_report, on_snapshot);
    } else {
      const InitialData init = initial_for(cfg);
      stats = initial_stats(init.field, cfg.solver);
      // Step-0 snapshot so that even an immediately interrupted run can be resumed.
      SolverState zero;
      zero.u = init.field;
      zero.dt = cfg.solver.dt0;
      emit_snapshot(zero, stats, cfg, snap_path);
      traj = run(init.field, cfg.solver, on_report, on_snapshot);
      for (const auto& w : traj.warnings) std::cerr << "warning: " << w << '\n';
    }
  } catch (const Abandoned&) {
    std::cout << "stopped after " << taken << " steps without a manifest; continue with --resume\n";
    return kExitOk;
  }
  rows.close();

  RunManifest manifest;
  manifest.config = cfg;
  manifest.outputs = {record_output(csv), record_output(snap_path)};
  manifest.terminal_status = traj.status;
  manifest.reason = traj.reason;
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(manifest_path, emit_manifest(manifest));

  std::cout << "status " << to_string(traj.status) << " (" << traj.reason << ") at t=" << traj.final_time()
            << " after " << traj.reports.size() << " steps; outputs in " << out.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Globals& g, const std::vector<double>& alphas) {
  const RunConfig cfg = load(g);
  SweepSpec spec;
  spec.alphas = alphas;
  spec.base = cfg.solver;
  if (cfg.grid.kind == DomainKind::WholeSpaceTruncated) {
    spec.data = cfg.data;
    spec.n = cfg.grid.n;
    spec.radius = cfg.grid.radius;
  } else {
    spec.ball_data = cfg.data;
    spec.ball_n = cfg.grid.n;
  }
  std::vector<SweepEntry> entries;
  try {
    entries = run_regime_sweep(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path out = output_dir(g) / "sweep";
  fs::create_directories(out);
  std::string summary = "alpha,regime,verdict,status,t_final,detail\n";
  bool failed = false;
  for (const auto& e : entries) {
    emit_timeseries(e.trajectory, out / ("alpha_" + format_double(e.alpha) + ".csv"));
    summary += format_double(e.alpha) + "," + to_string(e.regime) + "," + to_string(e.verdict) + "," +
               to_string(e.trajectory.status) + "," + format_double(e.trajectory.final_time()) + ",\"" +
               e.detail + "\"\n";
    failed = failed || e.verdict == Verdict::Fail;
    std::cout << "alpha=" << e.alpha << "  " << to_string(e.regime) << "  " << to_string(e.verdict) << "  "
              << e.detail << '\n';
  }
  write_file(out / "summary.csv", summary);
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_verify(const Globals& g, const std::vector<int>& only) {
  AcceptanceOptions options;
  options.only = only;
  if (!g.out_dir.empty()) options.work_dir = fs::path(g.out_dir) / "verify";
  if (!g.quiet) {
    options.on_result = [](const CriterionResult& r) { std::cerr << format_result_line(r) << '\n'; };
  }
  const auto results = run_acceptance(options);
  std::cout << format_acceptance_table(results);
  for (const auto& r : results) {
    if (!r.pass) return kExitCheckFailed;
  }
  return kExitOk;
}

struct ConvergeFlags {
  std::string axis = "joint";
  int levels = 4;
  double t_probe = 0.5;
  std::size_t n0 = 65;
  double dt0 = 0.05;
  std::vector<double> expect_order;
};

int cmd_converge(const Globals& g, const ConvergeFlags& f) {
  const RunConfig cfg = load(g);
  ConvergenceSpec spec;
  spec.data = cfg.data;
  spec.alpha = cfg.solver.alpha;
  spec.domain = cfg.grid.kind;
  spec.radius = cfg.grid.radius;
  spec.levels = f.levels;
  spec.t_probe = f.t_probe;
  spec.n0 = f.n0;
  spec.dt0 = f.dt0;
  if (f.axis == "joint") {
    spec.axis = RefinementAxis::Joint;
  } else if (f.axis == "space") {
    spec.axis = RefinementAxis::Space;
  } else if (f.axis == "time") {
    spec.axis = RefinementAxis::Time;
  } else {
    throw UsageError("--axis must be joint, space or time");
  }
  ConvergenceTable table;
  try {
    table = convergence_study(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::string csv = "h,dt,error\n";
  for (const auto& row : table.rows) {
    csv += format_double(row.h) + "," + format_double(row.dt) + "," + format_double(row.error) + "\n";
    std::cout << "h=" << row.h << "  dt=" << row.dt << "  error=" << row.error << '\n';
  }
  const fs::path out = output_dir(g);
  fs::create_directories(out);
  write_file(out / "convergence.csv", csv);

  bool ok = true;
  std::cout << "orders:";
  for (double o : table.orders) {
    std::cout << ' ' << o;
    if (f.expect_order.size() == 2) ok = ok && o >= f.expect_order[0] && o <= f.expect_order[1];
  }
  std::cout << '\n';
  if (f.expect_order.size() == 2) {
    std::cout << "expected orders in [" << f.expect_order[0] << ", " << f.expect_order[1] << "]: "
              << (ok ? "ok" : "FAILED") << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial solver for u_t = ((-Lap)^-1 u) Lap u + alpha u^2"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "YAML or JSON run document")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "output directory (default: $NLDIFF_OUT_DIR or ./nldiff-out)");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  bool resume_flag = false;
  std::size_t stop_after = 0;
  auto* run_cmd = app.add_subcommand("run", "integrate one scenario");
  run_cmd->add_flag("--resume", resume_flag, "continue from <out>/snapshot.json");
  run_cmd->add_option("--stop-after", stop_after, "abandon the run after N steps, as if interrupted");

  std::vector<double> alphas{0.4, 0.6, 0.8, 1.5};
  auto* sweep_cmd = app.add_subcommand("sweep", "run each alpha in its regime scenario");
  sweep_cmd->add_option("--alphas", alphas, "comma-separated alpha values")->delimiter(',');

  std::vector<int> only;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_option("--only", only, "criterion ids to run")->delimiter(',')->check(CLI::Range(1, 11));

  ConvergeFlags conv;
  auto* conv_cmd = app.add_subcommand("converge", "grid/time-step refinement study");
  conv_cmd->add_option("--axis", conv.axis, "joint, space or time");
  conv_cmd->add_option("--levels", conv.levels, "refinement levels (>= 3)");
  conv_cmd->add_option("--t-probe", conv.t_probe, "comparison time");
  conv_cmd->add_option("--n0", conv.n0, "coarsest node count");
  conv_cmd->add_option("--dt0", conv.dt0, "coarsest time step");
  conv_cmd->add_option("--expect-order", conv.expect_order, "LO,HI: fail unless every order lies inside")
      ->delimiter(',')
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(g, resume_flag, stop_after);
    if (*sweep_cmd) return cmd_sweep(g, alphas);
    if (*verify_cmd) return cmd_verify(g, only);
    if (*conv_cmd) return cmd_converge(g, conv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}
